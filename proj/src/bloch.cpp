#include "qcons/bloch.hpp"

#include "qcons/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace qcons {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kClampTol = 1e-12;

// Round-off on the surface may push arguments slightly outside their domain.
double clamp_unit(double v, const char* what) {
    if (v > 1.0 + kClampTol || v < -1.0 - kClampTol || std::isnan(v)) {
        throw DomainError(std::string(what) + " argument outside [-1, 1]");
    }
    return std::clamp(v, -1.0, 1.0);
}

double safe_sqrt(double v, const char* what) {
    if (v < -kClampTol || std::isnan(v)) {
        throw DomainError(std::string(what) + " under the square root is negative");
    }
    return std::sqrt(std::max(v, 0.0));
}

}  // namespace

bool at_pole(double theta) { return std::abs(std::sin(theta)) < kPoleTol; }

std::pair<double, double> SphericalVelocity::phi_dots() const {
    if (!phi1_dot || !phi2_dot) {
        throw PoleSingularity("azimuthal rate undefined at a pole");
    }
    return {*phi1_dot, *phi2_dot};
}

Eigen::Vector2cd bloch_spinor(double theta, double phi) {
    return {std::cos(0.5 * theta), std::polar(std::sin(0.5 * theta), phi)};
}

HilbertVector product_state(const BlochPoint& bp) {
    const Eigen::Vector2cd a = bloch_spinor(bp.theta1, bp.phi1);
    const Eigen::Vector2cd b = bloch_spinor(bp.theta2, bp.phi2);
    HilbertVector v{CVec(4)};
    v.amps << a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1];
    return v;
}

Ex1Branches bloch_branches_ex1(const PhasePoint& pt) {
    if (pt.n_levels() != 4) {
        throw DimensionError("two-spin sphere map needs a 4-level point");
    }
    const double p1 = pt.p[0], p2 = pt.p[1], p3 = pt.p[2];
    const double p4 = pt.p_last();
    const double prod = p1 * p4;
    if (!(prod >= 1e-12)) {
        throw ChartSingularity("p1 p4 too small for the sphere map");
    }
    const double s = std::sqrt(prod);
    const double a = std::asin(clamp_unit(safe_sqrt(p2 + p3 - 2.0 * s, "p2 + p3 - 2 sqrt(p1 p4)"), "arcsin"));
    const double b = std::acos(clamp_unit(safe_sqrt(p1 + p4 - s, "p1 + p4 - sqrt(p1 p4)"), "arccos"));
    const double c = std::acos(clamp_unit(0.5 * (p3 - p2) / s, "arccos"));
    return {a + b, a - b, -0.5 * (pt.q[0] + c), -0.5 * (pt.q[0] - c)};
}

BlochPoint phase_to_bloch_ex1(const PhasePoint& pt) {
    validate(pt, 4);
    const ConstraintSet cs = two_spin_product_constraints();
    if (cs.max_residual(to_coords(pt)) > 1e-8) {
        throw DomainError("point is not on the two-spin product surface");
    }
    const Ex1Branches br = bloch_branches_ex1(pt);
    BlochPoint bp{br.theta_plus, br.phi_plus, br.theta_minus, br.phi_minus};
    if (bp.theta2 < 0.0) {
        bp.theta2 = -bp.theta2;
        bp.phi2 += kPi;
    }
    bp.phi1 = wrap_angle(bp.phi1);
    bp.phi2 = wrap_angle(bp.phi2);
    return bp;
}

SphericalVelocity spherical_velocity_ex1(const BlochPoint& bp, const EnergySpectrum& spec) {
    if (spec.n_levels() != 4) {
        throw DimensionError("two-spin sphere equations need a 4-level spectrum");
    }
    const Vec w = spec.frequencies();
    const double c = w[0] - w[1] - w[2];
    const double s1 = std::sin(0.5 * bp.theta1);
    const double s2 = std::sin(0.5 * bp.theta2);
    const double rate = -0.5 * c * (s1 * s1 + s2 * s2) - 0.5 * (w[1] + w[2]);
    return {0.0, 0.0, rate, rate};
}

SphericalVelocity spherical_velocity_ex3(const BlochPoint& bp, const EnergySpectrum& spec) {
    if (spec.n_levels() != 4) {
        throw DimensionError("two-spin sphere equations need a 4-level spectrum");
    }
    const Vec w = spec.frequencies();
    const double w1 = w[0], w2 = w[1], w3 = w[2];
    const double ct1 = std::cos(bp.theta1), st1 = std::sin(bp.theta1);
    const double ct2 = std::cos(bp.theta2), st2 = std::sin(bp.theta2);
    const double sd = std::sin(bp.phi1 - bp.phi2);
    const double cd = std::cos(bp.phi1 - bp.phi2);

    SphericalVelocity v;
    v.theta1_dot = sd * st2 * ((w1 - w2) * ct1 + w2 - w3);
    v.theta2_dot = sd * st1 * ((w2 - w1) * ct2 - w2 + w3);
    if (std::abs(st1) < kPoleTol || std::abs(st2) < kPoleTol) {
        return v;
    }
    const double k = cd / (st1 * st2);
    const double diff = ct1 * ct1 - ct2 * ct2;
    v.phi1_dot = 0.5 * (-w1 + (w2 - 0.5 * w1) * ct2 + (1.5 * w1 - w2 - 2.0 * w3) * ct1 +
                        k * (2.0 * (w3 - w2) * st1 * st1 * ct2 + (w1 - w2) * diff));
    v.phi2_dot = 0.5 * (-w1 + (w2 - 0.5 * w1) * ct1 + (1.5 * w1 - w2 - 2.0 * w3) * ct2 +
                        k * (2.0 * (w3 - w2) * ct1 * st2 * st2 - (w1 - w2) * diff));
    return v;
}

double grid_theta(int i, int n_theta) { return kPi * static_cast<double>(i) / (n_theta - 1); }

double grid_phi(int j, int n_phi) { return -kPi + 2.0 * kPi * static_cast<double>(j + 1) / n_phi; }

FieldGrid field_grid(ModelId model, const EnergySpectrum& spec, const FixedAngles& fixed, int n_theta,
                     int n_phi) {
    if (n_theta < 2 || n_phi < 2) {
        throw DomainError("field grid needs at least 2 x 2 samples");
    }
    if (!(fixed.theta2 >= 0.0 && fixed.theta2 <= kPi)) {
        throw DomainError("fixed theta2 must lie in [0, pi]");
    }
    if (fixed.phi2 && !std::isfinite(*fixed.phi2)) {
        throw DomainError("fixed phi2 must be finite");
    }
    if (model == ModelId::TwoSpinDisentangled && !fixed.phi2) {
        throw DomainError("the disentangled field needs both theta2 and phi2 fixed");
    }
    if (model != ModelId::TwoSpinProduct && model != ModelId::TwoSpinDisentangled) {
        throw DomainError("sphere fields exist only for the two-spin models");
    }

    FieldGrid grid{model, fixed, n_theta, n_phi, {}};
    grid.samples.reserve(static_cast<std::size_t>(n_theta) * n_phi);
    for (int i = 0; i < n_theta; ++i) {
        for (int j = 0; j < n_phi; ++j) {
            FieldSample s;
            s.theta1 = grid_theta(i, n_theta);
            s.phi1 = grid_phi(j, n_phi);
            const BlochPoint bp{s.theta1, s.phi1, fixed.theta2, fixed.phi2.value_or(0.0)};
            const SphericalVelocity v = model == ModelId::TwoSpinProduct
                                            ? spherical_velocity_ex1(bp, spec)
                                            : spherical_velocity_ex3(bp, spec);
            s.theta1_dot = v.theta1_dot;
            s.phi1_dot = v.phi1_dot;
            if (at_pole(s.theta1)) {
                s.flag = SampleFlag::Pole;
            } else if (!s.phi1_dot || !std::isfinite(*s.phi1_dot) || !std::isfinite(s.theta1_dot)) {
                s.flag = SampleFlag::Undefined;
            }
            grid.samples.push_back(s);
        }
    }
    return grid;
}

}  // namespace qcons
