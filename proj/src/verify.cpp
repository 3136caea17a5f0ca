#include "qcons/verify.hpp"

#include "qcons/bloch.hpp"
#include "qcons/errors.hpp"
#include "qcons/integrator.hpp"
#include "qcons/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace qcons {

namespace {

constexpr std::uint64_t kSeed = 20260318;
constexpr double kPi = std::numbers::pi;

class Suite {
public:
    explicit Suite(ModelId model) : name_(model_name(model)) {}

    // measured <= tol passes; a thrown Error fails with its message.
    void check(const std::string& name, double tol, const std::function<double()>& measure) {
        CheckResult r{name_, name, false, 0.0, tol, {}};
        try {
            r.measured = measure();
            r.passed = std::isfinite(r.measured) && r.measured <= tol;
        } catch (const std::exception& e) {
            r.detail = e.what();
        }
        results_.push_back(std::move(r));
    }

    std::vector<CheckResult> take() { return std::move(results_); }

private:
    std::string name_;
    std::vector<CheckResult> results_;
};

double max_abs(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }
double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

std::vector<PhasePoint> surface_points(ModelId model, int count, Rng& rng, int n = 4) {
    std::vector<PhasePoint> pts;
    for (int i = 0; i < count; ++i) pts.push_back(sample_on_surface(model, rng, n));
    return pts;
}

// Worst tangency, annihilation, energy-form and route-equivalence residuals.
void engine_identities(Suite& s, const ConstraintSet& cs, const std::vector<PhasePoint>& pts,
                       const EnergySpectrum& spec) {
    s.check("annihilation Omega~ grad Phi = 0", 1e-10, [&] {
        double worst = 0.0;
        for (const auto& pt : pts) worst = std::max(worst, annihilation_check(cs, pt, spec));
        return worst;
    });
    s.check("tangency grad Phi . x' = 0", 1e-10, [&] {
        double worst = 0.0;
        for (const auto& pt : pts)
            worst = std::max(worst, max_abs(Vec(cs.gradients(pt) * constrained_velocity(cs, pt, spec))));
        return worst;
    });
    s.check("antisymmetry of omega and Lambda", 1e-12, [&] {
        double worst = 0.0;
        for (const auto& pt : pts) {
            const ModifiedStructure ms = reduce(cs, pt, spec);
            worst = std::max({worst, max_abs(Mat(ms.omega_small + ms.omega_small.transpose())),
                              max_abs(Mat(ms.lambda + ms.lambda.transpose()))});
        }
        return worst;
    });
    s.check("energy form grad H . Omega~ grad H = 0", 1e-12, [&] {
        double worst = 0.0;
        const Vec gh = hamiltonian_gradient(spec);
        for (const auto& pt : pts)
            worst = std::max(worst, std::abs(gh.dot(reduce(cs, pt, spec).omega_tilde * gh)));
        return worst;
    });
    s.check("multiplier route equals reduced structure", 1e-12, [&] {
        double worst = 0.0;
        for (const auto& pt : pts)
            worst = std::max(worst, max_abs(Vec(multiplier_velocity(cs, pt, spec) -
                                                constrained_velocity(cs, pt, spec))));
        return worst;
    });
    s.check("analytic gradients vs finite differences", kGradientTolerance,
            [&] { return gradient_errors(cs, pts).worst; });
}

// Integrates t in [0, 10] at dt = 1e-3 and measures drift of p and the worst
// deviation of each q_i from a straight line.
void quasi_unitarity(Suite& s, ModelId model, const EnergySpectrum& spec, const PhasePoint& pt0) {
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 10.0;
    const Trajectory traj = integrate(model, spec, pt0, cfg);
    s.check("quasi-unitary: p constant", 1e-8, [&] {
        double worst = traj.completed() ? 0.0 : INFINITY;
        for (const auto& pt : traj.points) worst = std::max(worst, max_abs(Vec(pt.p - pt0.p)));
        return worst;
    });
    s.check("quasi-unitary: q linear in t", 1e-6, [&] {
        const double t_end = traj.times.back();
        double worst = 0.0;
        for (int i = 0; i < pt0.dim(); ++i) {
            const double slope = (traj.back().q[i] - pt0.q[i]) / t_end;
            for (std::size_t k = 0; k < traj.size(); ++k)
                worst = std::max(worst, std::abs(traj.points[k].q[i] - pt0.q[i] - slope * traj.times[k]));
        }
        return worst;
    });
}

std::vector<CheckResult> verify_unconstrained() {
    Suite s(ModelId::Unconstrained);
    Rng rng(kSeed);
    std::vector<PhasePoint> pts;
    for (int i = 0; i < 100; ++i) pts.push_back(random_interior_point(5, rng));
    const EnergySpectrum spec = EnergySpectrum::from_levels({2.0, 1.0, -0.5, -1.0, -2.0});

    s.check("build_state unit norm", 1e-12, [&] {
        double worst = 0.0;
        for (const auto& pt : pts) worst = std::max(worst, std::abs(build_state(pt, 5).amps.norm() - 1.0));
        return worst;
    });
    s.check("hilbert_to_phase inverts build_state", 1e-10, [&] {
        double worst = 0.0;
        for (const auto& pt : pts) {
            const PhasePoint back = hilbert_to_phase(build_state(pt, 5));
            for (int i = 0; i < pt.dim(); ++i)
                worst = std::max({worst, std::abs(wrap_angle(back.q[i] - pt.q[i])), std::abs(back.p[i] - pt.p[i])});
        }
        return worst;
    });
    s.check("hamiltonian gradient vs finite differences", 1e-8, [&] {
        double worst = 0.0;
        const double h = 1e-6;
        for (const auto& pt : pts) {
            const Vec x = to_coords(pt);
            const Vec g = hamiltonian_gradient(pt, spec);
            for (int a = 0; a < x.size(); ++a) {
                Vec xp = x, xm = x;
                xp[a] += h;
                xm[a] -= h;
                const double fd = (hamiltonian_value(from_coords(xp), spec) -
                                   hamiltonian_value(from_coords(xm), spec)) / (2 * h);
                worst = std::max(worst, std::abs(fd - g[a]));
            }
        }
        return worst;
    });
    s.check("canonical Omega squares to -I", 0.0, [&] {
        const Mat om = canonical_omega(5);
        return max_abs(Mat(om * om + Mat::Identity(8, 8)));
    });
    s.check("N = 0 reduction reproduces the unitary flow", 1e-12, [&] {
        IntegratorConfig cfg;
        cfg.t_end = 1.0;
        const Trajectory traj = integrate(ModelId::Unconstrained, spec, pts.front(), cfg);
        return max_abs(Vec(to_coords(traj.back()) - to_coords(unitary_flow(pts.front(), spec, 1.0))));
    });
    return s.take();
}

std::vector<CheckResult> verify_two_spin_product() {
    Suite s(ModelId::TwoSpinProduct);
    Rng rng(kSeed + 1);
    const ConstraintSet cs = two_spin_product_constraints();
    const double fig[] = {0.0, 0.5, -2.5};
    const EnergySpectrum spec = EnergySpectrum::from_frequencies(fig, 0.5);
    const auto on = surface_points(ModelId::TwoSpinProduct, 100, rng);
    std::vector<PhasePoint> interior;
    for (int i = 0; i < 200; ++i) interior.push_back(random_interior_point(4, rng));

    s.check("omega matrix is [[0,1],[-1,0]] at interior points", 1e-12, [&] {
        Mat expected(2, 2);
        expected << 0, 1, -1, 0;
        double worst = 0.0;
        for (const auto& pt : interior) worst = std::max(worst, max_abs(Mat(omega_matrix(cs, pt) - expected)));
        return worst;
    });
    s.check("Lambda q-p block matches closed form", 1e-12, [&] {
        double worst = 0.0;
        for (const auto& pt : interior)
            worst = std::max(worst, max_abs(Mat(lambda_tensor(cs, pt).topRightCorner(3, 3) -
                                                closed_form_lambda_block_ex1(pt))));
        return worst;
    });
    s.check("closed-form velocity matches reduction", 1e-10, [&] {
        double worst = 0.0;
        for (const auto& pt : on)
            worst = std::max(worst, max_abs(Vec(constrained_velocity(cs, pt, spec) -
                                                closed_form_velocity_ex1(pt, spec))));
        return worst;
    });
    engine_identities(s, cs, on, spec);
    s.check("spectrum condition gives the unitary velocity", 1e-12, [&] {
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const EnergySpectrum sc = random_condition_spectrum(ModelId::TwoSpinProduct, rng);
            const Vec vu = canonical_omega(4) * hamiltonian_gradient(sc);
            for (int i = 0; i < 5; ++i)
                worst = std::max(worst, max_abs(Vec(constrained_velocity(cs, on[i], sc) - vu)));
        }
        return worst;
    });
    s.check("sphere field: theta1' = 0 and phi1' = 1/2 - sin^2(theta1/2)", 1e-10, [&] {
        const FieldGrid g = field_grid(ModelId::TwoSpinProduct, spec, {kPi / 2, std::nullopt}, 32, 64);
        double worst = 0.0;
        for (const auto& smp : g.samples) {
            const double sh = std::sin(0.5 * smp.theta1);
            worst = std::max({worst, std::abs(smp.theta1_dot), std::abs(*smp.phi1_dot - (0.5 - sh * sh))});
        }
        return worst;
    });
    quasi_unitarity(s, ModelId::TwoSpinProduct, spec, on.front());
    return s.take();
}

std::vector<CheckResult> verify_three_spin_product() {
    Suite s(ModelId::ThreeSpinProduct);
    Rng rng(kSeed + 2);
    const ConstraintSet cs = three_spin_product_constraints();
    const EnergySpectrum spec = EnergySpectrum::from_levels({1.3, 0.7, 0.2, -0.1, -0.6, -0.9, -1.4, -2.0});
    const auto on = surface_points(ModelId::ThreeSpinProduct, 100, rng, 8);
    engine_identities(s, cs, on, spec);
    s.check("p' = 0 at on-surface points", 1e-12, [&] {
        double worst = 0.0;
        for (const auto& pt : on) worst = std::max(worst, max_abs(Vec(constrained_velocity(cs, pt, spec).tail(7))));
        return worst;
    });
    s.check("spectrum condition gives the unitary velocity", 1e-12, [&] {
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const EnergySpectrum sc = random_condition_spectrum(ModelId::ThreeSpinProduct, rng);
            const Vec vu = canonical_omega(8) * hamiltonian_gradient(sc);
            for (int i = 0; i < 5; ++i)
                worst = std::max(worst, max_abs(Vec(constrained_velocity(cs, on[i], sc) - vu)));
        }
        return worst;
    });
    quasi_unitarity(s, ModelId::ThreeSpinProduct, spec, on.front());
    return s.take();
}

std::vector<CheckResult> verify_disentangled() {
    Suite s(ModelId::TwoSpinDisentangled);
    Rng rng(kSeed + 3);
    const ConstraintSet cs = disentangled_constraints();
    const double fig[] = {0.0, 0.5, -2.5};
    const EnergySpectrum spec = EnergySpectrum::from_frequencies(fig, 0.5);
    const auto on = surface_points(ModelId::TwoSpinDisentangled, 100, rng);
    engine_identities(s, cs, on, spec);
    s.check("constraint zero set equals product-state condition", 1e-12, [&] {
        double worst = 0.0;
        for (const auto& pt : on) {
            worst = std::max({worst, max_abs(cs.values(pt)), segre_membership(ex3_basis_map(pt), ModelId::TwoSpinDisentangled)});
        }
        return worst;
    });
    s.check("sphere field reproduces the fixed-sphere formulas", 1e-10, [&] {
        const FieldGrid g = field_grid(ModelId::TwoSpinDisentangled, spec, {kPi / 2, kPi / 2}, 32, 64);
        double worst = 0.0;
        for (const auto& smp : g.samples) {
            const double t = smp.theta1, f = smp.phi1;
            if (std::sin(t) <= 0.05) continue;
            const double td = std::cos(f) * (0.5 * std::cos(t) - 3.0);
            const double fd = 0.25 * (9.0 * std::cos(t) - std::sin(f) * std::cos(t) * std::cos(t) / std::sin(t));
            worst = std::max({worst, std::abs(smp.theta1_dot - td), std::abs(*smp.phi1_dot - fd)});
        }
        return worst;
    });
    s.check("printed closed-form velocity matches reduction", 1e-8, [&] {
        double worst = 0.0;
        for (const auto& pt : on)
            worst = std::max(worst, max_abs(Vec(constrained_velocity(cs, pt, spec) -
                                                closed_form_velocity_ex3(pt, spec))));
        return worst;
    });
    s.check("energy conserved along the flow (t = 1, dt = 1e-3)", 1e-8, [&] {
        IntegratorConfig cfg;
        cfg.t_end = 1.0;
        const Trajectory traj = integrate(ModelId::TwoSpinDisentangled, spec, on.front(), cfg);
        if (!traj.completed()) throw ChartSingularity(traj.message);
        double worst = 0.0;
        for (double e : traj.energies) worst = std::max(worst, std::abs(e - traj.energies.front()));
        return worst;
    });
    return s.take();
}

}  // namespace

std::vector<CheckResult> verify_model(ModelId model) {
    switch (model) {
        case ModelId::Unconstrained: return verify_unconstrained();
        case ModelId::TwoSpinProduct: return verify_two_spin_product();
        case ModelId::ThreeSpinProduct: return verify_three_spin_product();
        case ModelId::TwoSpinDisentangled: return verify_disentangled();
    }
    return {};
}

std::vector<CheckResult> verify_all() {
    std::vector<CheckResult> all;
    for (ModelId m : {ModelId::Unconstrained, ModelId::TwoSpinProduct, ModelId::ThreeSpinProduct,
                      ModelId::TwoSpinDisentangled}) {
        auto r = verify_model(m);
        all.insert(all.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
    }
    return all;
}

}  // namespace qcons
