#include "qcons/dirac.hpp"

#include "qcons/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qcons {

ConstraintSet::ConstraintSet(int n_levels, ValueFn values, GradFn gradients,
                             std::vector<std::string> labels, std::vector<bool> angular)
    : n_levels_(n_levels),
      values_(std::move(values)),
      gradients_(std::move(gradients)),
      labels_(std::move(labels)),
      angular_(std::move(angular)) {
    if (n_levels_ < 2) {
        throw DomainError("constraint set needs n >= 2 levels");
    }
    if (labels_.size() % 2 != 0) {
        throw DomainError("algebraic constraint sets must have an even number of members");
    }
    if (angular_.size() != labels_.size()) {
        throw DimensionError("angular flags must match the number of constraints");
    }
}

ConstraintSet ConstraintSet::empty(int n_levels) {
    const int d = 2 * (n_levels - 1);
    return ConstraintSet(
        n_levels, [](const Vec&) { return Vec(0); }, [d](const Vec&) { return Mat(0, d); }, {}, {});
}

Vec ConstraintSet::values(const Vec& x) const {
    if (x.size() != 2 * (n_levels_ - 1)) {
        throw DimensionError("coordinate vector does not match constraint set");
    }
    return values_(x);
}

Mat ConstraintSet::gradients(const Vec& x) const {
    if (x.size() != 2 * (n_levels_ - 1)) {
        throw DimensionError("coordinate vector does not match constraint set");
    }
    return gradients_(x);
}

double ConstraintSet::max_residual(const Vec& x) const {
    const Vec phi = values(x);
    return phi.size() == 0 ? 0.0 : phi.cwiseAbs().maxCoeff();
}

namespace {

Mat omega_from_gradients(const Mat& g, const Mat& om) { return g * om * g.transpose(); }

Mat lambda_from(const Mat& g, const Mat& om, const Mat& inv) {
    return om * g.transpose() * inv * g * om.transpose();
}

}  // namespace

Mat omega_matrix(const ConstraintSet& cs, const PhasePoint& pt) {
    validate(pt, cs.n_levels());
    return omega_from_gradients(cs.gradients(pt), canonical_omega(cs.n_levels()));
}

Mat invert_omega(const Mat& m) {
    if (m.rows() != m.cols()) {
        throw DimensionError("omega matrix must be square");
    }
    if (m.rows() % 2 != 0) {
        throw DomainError("omega matrix must have even size");
    }
    if (m.rows() == 0) {
        return m;
    }
    Eigen::JacobiSVD<Mat> svd(m);
    const Vec& s = svd.singularValues();
    const double smax = s[0];
    const double smin = s[s.size() - 1];
    if (!(smin > 0.0) || smax / smin > kMaxOmegaCondition) {
        std::ostringstream msg;
        msg << "constraint commutator matrix is singular (sigma_min = " << smin
            << ", sigma_max = " << smax << ")";
        throw SingularOmega(msg.str());
    }
    return m.partialPivLu().inverse();
}

ModifiedStructure reduce(const ConstraintSet& cs, const PhasePoint& pt, const EnergySpectrum& spec) {
    validate(pt, cs.n_levels());
    if (spec.n_levels() != cs.n_levels()) {
        throw DimensionError("spectrum and constraint set disagree on the number of levels");
    }
    const Mat om = canonical_omega(cs.n_levels());
    const Mat g = cs.gradients(pt);
    ModifiedStructure ms;
    ms.omega_small = omega_from_gradients(g, om);
    ms.omega_small_inv = invert_omega(ms.omega_small);
    ms.lambda = lambda_from(g, om, ms.omega_small_inv);
    ms.omega_tilde = om + ms.lambda;
    const Vec c = g * om * hamiltonian_gradient(spec);
    ms.multipliers = ms.omega_small_inv.transpose() * c;
    return ms;
}

Vec lagrange_multipliers(const ConstraintSet& cs, const PhasePoint& pt, const EnergySpectrum& spec) {
    return reduce(cs, pt, spec).multipliers;
}

Mat lambda_tensor(const ConstraintSet& cs, const PhasePoint& pt) {
    validate(pt, cs.n_levels());
    const Mat om = canonical_omega(cs.n_levels());
    const Mat g = cs.gradients(pt);
    return lambda_from(g, om, invert_omega(omega_from_gradients(g, om)));
}

Vec constrained_velocity(const ConstraintSet& cs, const PhasePoint& pt, const EnergySpectrum& spec) {
    return reduce(cs, pt, spec).omega_tilde * hamiltonian_gradient(spec);
}

Vec constrained_velocity(const ConstraintSet& cs, const Vec& x, const EnergySpectrum& spec) {
    return constrained_velocity(cs, from_coords(x), spec);
}

Vec multiplier_velocity(const ConstraintSet& cs, const PhasePoint& pt, const EnergySpectrum& spec) {
    const ModifiedStructure ms = reduce(cs, pt, spec);
    const Mat om = canonical_omega(cs.n_levels());
    const Mat g = cs.gradients(pt);
    return om * hamiltonian_gradient(spec) + om * g.transpose() * ms.multipliers;
}

double annihilation_check(const ConstraintSet& cs, const PhasePoint& pt, const EnergySpectrum& spec) {
    if (cs.size() == 0) {
        return 0.0;
    }
    const ModifiedStructure ms = reduce(cs, pt, spec);
    const Mat normals = ms.omega_tilde * cs.gradients(pt).transpose();
    return normals.cwiseAbs().maxCoeff();
}

GradientReport gradient_errors(const ConstraintSet& cs, const std::vector<PhasePoint>& pts, double h) {
    GradientReport report;
    report.max_rel_error.assign(cs.size(), 0.0);
    for (const PhasePoint& pt : pts) {
        const Vec x = to_coords(pt);
        const Mat analytic = cs.gradients(x);
        Mat numeric(cs.size(), x.size());
        for (int a = 0; a < x.size(); ++a) {
            Vec xp = x;
            Vec xm = x;
            xp[a] += h;
            xm[a] -= h;
            Vec diff = cs.values(xp) - cs.values(xm);
            for (int alpha = 0; alpha < cs.size(); ++alpha) {
                if (cs.is_angular(alpha)) {
                    diff[alpha] = wrap_angle(diff[alpha]);
                }
            }
            numeric.col(a) = diff / (2.0 * h);
        }
        for (int alpha = 0; alpha < cs.size(); ++alpha) {
            const double scale = std::max(1.0, analytic.row(alpha).cwiseAbs().maxCoeff());
            const double err = (analytic.row(alpha) - numeric.row(alpha)).cwiseAbs().maxCoeff() / scale;
            report.max_rel_error[alpha] = std::max(report.max_rel_error[alpha], err);
            report.worst = std::max(report.worst, err);
        }
        ++report.points_checked;
    }
    return report;
}

GradientReport validate_gradients(const ConstraintSet& cs, const std::vector<PhasePoint>& pts) {
    GradientReport report = gradient_errors(cs, pts);
    for (int alpha = 0; alpha < cs.size(); ++alpha) {
        if (report.max_rel_error[alpha] > kGradientTolerance) {
            std::ostringstream msg;
            msg << "analytic gradient of " << cs.labels()[alpha] << " disagrees with finite differences"
                << " (relative error " << report.max_rel_error[alpha] << ")";
            throw GradientMismatch(msg.str());
        }
    }
    return report;
}

}  // namespace qcons
