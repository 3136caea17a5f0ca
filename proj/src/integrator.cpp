#include "qcons/integrator.hpp"

#include "qcons/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace qcons {

void IntegratorConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be non-negative");
    if (!(drift_tol > 0.0)) throw DomainError("drift_tol must be positive");
    if (!(tolerance > 0.0)) throw DomainError("tolerance must be positive");
    if (!(projection_tol > 0.0) || !(projection_threshold > 0.0)) {
        throw DomainError("projection tolerances must be positive");
    }
    if (!(singularity_floor >= 0.0)) throw DomainError("singularity floor must be non-negative");
}

std::string_view status_name(RunStatus s) {
    switch (s) {
        case RunStatus::Completed: return "completed";
        case RunStatus::SingularOmega: return "singular_omega";
        case RunStatus::ChartSingularity: return "chart_singularity";
        case RunStatus::ProjectionFailed: return "projection_failed";
        case RunStatus::DriftExceeded: return "drift_exceeded";
    }
    return "unknown";
}

namespace {

// Velocity field with the chart checks the integrator needs; works on raw
// coordinates so that intermediate Runge-Kutta stages are not rejected by
// the strict simplex validation of PhasePoint.
class Field {
public:
    Field(const ConstraintSet& cs, const EnergySpectrum& spec, double floor)
        : cs_(cs),
          om_(canonical_omega(cs.n_levels())),
          grad_h_(hamiltonian_gradient(spec)),
          floor_(floor) {}

    Vec operator()(const Vec& x) const {
        check_chart(x);
        if (cs_.size() == 0) {
            return om_ * grad_h_;
        }
        const Mat g = cs_.gradients(x);
        const Mat inv = invert_omega(g * om_ * g.transpose());
        const Mat lambda = om_ * g.transpose() * inv * g * om_.transpose();
        Vec v = (om_ + lambda) * grad_h_;
        if (!v.allFinite()) {
            throw ChartSingularity("non-finite velocity");
        }
        return v;
    }

    void check_chart(const Vec& x) const {
        const auto m = x.size() / 2;
        const auto p = x.tail(m);
        const double p_last = 1.0 - p.sum();
        if (!(p_last >= floor_) || !(p.minCoeff() >= -floor_)) {
            throw ChartSingularity("trajectory left the action-angle chart (p_n = " +
                                   std::to_string(p_last) + ")");
        }
    }

private:
    const ConstraintSet& cs_;
    Mat om_;
    Vec grad_h_;
    double floor_;
};

Vec rk4_step(const Field& f, const Vec& x, double h) {
    const Vec k1 = f(x);
    const Vec k2 = f(x + 0.5 * h * k1);
    const Vec k3 = f(x + 0.5 * h * k2);
    const Vec k4 = f(x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Dormand-Prince 5(4). Returns the 5th-order solution and the error estimate.
std::pair<Vec, Vec> dopri_step(const Field& f, const Vec& x, double h) {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    const Vec k1 = f(x);
    const Vec k2 = f(x + h * a21 * k1);
    const Vec k3 = f(x + h * (a31 * k1 + a32 * k2));
    const Vec k4 = f(x + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 = f(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec k6 = f(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vec y = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec k7 = f(y);
    const Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    return {y, err};
}

class Recorder {
public:
    Recorder(const ConstraintSet& cs, const EnergySpectrum& spec, Trajectory& out)
        : cs_(cs), spec_(spec), out_(out) {}

    void record(double t, const Vec& x) {
        const PhasePoint pt = from_coords(x);
        const Vec phi = cs_.values(x);
        out_.times.push_back(t);
        out_.energies.push_back(spec_.ground() + spec_.frequencies().dot(pt.p));
        out_.residuals.push_back(phi.size() == 0 ? 0.0 : phi.cwiseAbs().maxCoeff());
        out_.constraint_values.push_back(phi);
        out_.multipliers.push_back(multipliers(x));
        out_.points.push_back(pt);
    }

private:
    Vec multipliers(const Vec& x) const {
        if (cs_.size() == 0) {
            return Vec(0);
        }
        const Mat om = canonical_omega(cs_.n_levels());
        const Mat g = cs_.gradients(x);
        const Mat inv = invert_omega(g * om * g.transpose());
        return inv.transpose() * (g * om * hamiltonian_gradient(spec_));
    }

    const ConstraintSet& cs_;
    const EnergySpectrum& spec_;
    Trajectory& out_;
};

}  // namespace

Trajectory integrate(const ConstraintSet& cs, const EnergySpectrum& spec, const PhasePoint& pt0,
                     const IntegratorConfig& cfg) {
    cfg.validate();
    validate(pt0, cs.n_levels());
    if (spec.n_levels() != cs.n_levels()) {
        throw DimensionError("spectrum and constraint set disagree on the number of levels");
    }
    const Vec x0 = to_coords(pt0);
    const double r0 = cs.max_residual(x0);
    if (r0 > cfg.drift_tol) {
        std::ostringstream msg;
        msg << "initial point is off the constraint surface (max |Phi| = " << r0 << ")";
        throw DomainError(msg.str());
    }
    const Field field(cs, spec, cfg.singularity_floor);
    field.check_chart(x0);
    field(x0);  // surfaces SingularOmega at the start as an exception

    Trajectory traj;
    Recorder rec(cs, spec, traj);
    rec.record(0.0, x0);

    const double drift_limit = 1000.0 * cfg.drift_tol;
    Vec x = x0;
    double t = 0.0;
    double h = cfg.dt;
    std::size_t k = 0;

    auto finish = [&](RunStatus s, const std::string& what) {
        traj.status = s;
        traj.message = what;
    };

    while (t < cfg.t_end) {
        Vec next;
        double t_next = 0.0;
        try {
            if (cfg.scheme == Scheme::RK4) {
                ++k;
                t_next = std::min(static_cast<double>(k) * cfg.dt, cfg.t_end);
                if (cfg.t_end - t_next < 1e-12 * cfg.dt) t_next = cfg.t_end;
                next = rk4_step(field, x, t_next - t);
            } else {
                for (;;) {
                    h = std::min(h, cfg.t_end - t);
                    auto [y, err] = dopri_step(field, x, h);
                    double e = 0.0;
                    for (int i = 0; i < x.size(); ++i) {
                        const double scale =
                            cfg.tolerance * (1.0 + std::max(std::abs(x[i]), std::abs(y[i])));
                        e = std::max(e, std::abs(err[i]) / scale);
                    }
                    const double factor =
                        e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
                    if (e <= 1.0) {
                        t_next = t + h;
                        if (cfg.t_end - t_next < 1e-12 * std::max(1.0, cfg.t_end)) t_next = cfg.t_end;
                        next = std::move(y);
                        h *= factor;
                        break;
                    }
                    h *= factor;
                    if (h < 1e-14 * std::max(1.0, cfg.t_end)) {
                        throw ChartSingularity("adaptive step size underflow");
                    }
                }
            }
            field.check_chart(next);

            const double r = cs.max_residual(next);
            const bool project =
                (cfg.projection == ProjectionMode::EveryStep && r > cfg.projection_tol) ||
                (cfg.projection == ProjectionMode::Threshold && r > cfg.projection_threshold);
            if (project) {
                next = to_coords(project_onto_surface(cs, from_coords(next), cfg.projection_tol).point);
                ++traj.projections;
            }
            x = std::move(next);
            t = t_next;
            rec.record(t, x);
        } catch (const SingularOmega& e) {
            finish(RunStatus::SingularOmega, e.what());
            return traj;
        } catch (const ChartSingularity& e) {
            finish(RunStatus::ChartSingularity, e.what());
            return traj;
        } catch (const ProjectionFailed& e) {
            finish(RunStatus::ProjectionFailed, e.what());
            return traj;
        }
        if (cfg.projection == ProjectionMode::Off && traj.residuals.back() > drift_limit) {
            std::ostringstream msg;
            msg << "constraint drift " << traj.residuals.back() << " exceeds " << drift_limit;
            finish(RunStatus::DriftExceeded, msg.str());
            return traj;
        }
    }
    return traj;
}

Trajectory integrate(ModelId model, const EnergySpectrum& spec, const PhasePoint& pt0,
                     const IntegratorConfig& cfg) {
    return integrate(model_constraints(model, spec.n_levels(), cfg.singularity_floor), spec, pt0, cfg);
}

ProjectionResult project_onto_surface(const ConstraintSet& cs, const PhasePoint& pt, double tol) {
    Vec x = to_coords(pt);
    for (int it = 0;; ++it) {
        const Vec phi = cs.values(x);
        const double r = phi.size() == 0 ? 0.0 : phi.cwiseAbs().maxCoeff();
        if (r < tol) {
            return {from_coords(x), it, r};
        }
        if (it == kMaxNewtonIterations) {
            std::ostringstream msg;
            msg << "Newton projection did not converge (max |Phi| = " << r << ")";
            throw ProjectionFailed(msg.str());
        }
        const Mat g = cs.gradients(x);
        const Mat normal = g * g.transpose();
        Eigen::JacobiSVD<Mat> svd(normal);
        const Vec& s = svd.singularValues();
        if (!(s[s.size() - 1] > 1e-14 * std::max(1.0, s[0]))) {
            throw ProjectionFailed("constraint Jacobian is rank deficient");
        }
        x -= g.transpose() * normal.ldlt().solve(phi);
        if (!x.allFinite()) {
            throw ProjectionFailed("Newton projection produced non-finite coordinates");
        }
    }
}

FlowComparison compare_flows(ModelId model, const EnergySpectrum& spec, const PhasePoint& pt0,
                             const IntegratorConfig& cfg) {
    const ConstraintSet cs = model_constraints(model, spec.n_levels(), cfg.singularity_floor);
    const Trajectory traj = integrate(cs, spec, pt0, cfg);

    FlowComparison out;
    out.status = traj.status;
    out.condition_holds = model == ModelId::Unconstrained || spectrum_condition(spec, model);
    out.predicted_zero = out.condition_holds;
    const Vec unitary_v = canonical_omega(spec.n_levels()) * hamiltonian_gradient(spec);
    out.initial_rate = (constrained_velocity(cs, pt0, spec) - unitary_v).cwiseAbs().maxCoeff();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const PhasePoint u = unitary_flow(pt0, spec, traj.times[i]);
        const double d = (to_coords(traj.points[i]) - to_coords(u)).cwiseAbs().maxCoeff();
        out.times.push_back(traj.times[i]);
        out.divergence.push_back(d);
        out.max_divergence = std::max(out.max_divergence, d);
    }
    if (!out.times.empty() && out.times.back() > 0.0) {
        out.observed_rate = out.divergence.back() / out.times.back();
    }
    return out;
}

}  // namespace qcons
