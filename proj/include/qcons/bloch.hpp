#pragma once

// Two-sphere pictures of the two-spin models. A product state is
//   (cos(t1/2)|u> + sin(t1/2) e^{i f1}|d>) (x) (cos(t2/2)|u> + sin(t2/2) e^{i f2}|d>),
// with amplitudes ordered (|uu>, |ud>, |du>, |dd>).

#include "qcons/models.hpp"
#include "qcons/phase_space.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace qcons {

struct BlochPoint {
    double theta1 = 0.0;
    double phi1 = 0.0;
    double theta2 = 0.0;
    double phi2 = 0.0;
};

inline constexpr double kPoleTol = 1e-12;

bool at_pole(double theta);

Eigen::Vector2cd bloch_spinor(double theta, double phi);
HilbertVector product_state(const BlochPoint& bp);

/// Raw '+' and '-' branches of the action-angle -> sphere inversion for the
/// two-spin product model, before any canonicalisation.
struct Ex1Branches {
    double theta_plus = 0.0;
    double theta_minus = 0.0;
    double phi_plus = 0.0;
    double phi_minus = 0.0;
};

Ex1Branches bloch_branches_ex1(const PhasePoint& pt);

/// Sphere coordinates for a point on the two-spin product surface. The '-'
/// branch theta is folded into [0, pi] via (theta, phi) -> (-theta, phi + pi);
/// phis are wrapped to (-pi, pi].
/// Throws DomainError off-surface, ChartSingularity when p1 p4 < 1e-12.
BlochPoint phase_to_bloch_ex1(const PhasePoint& pt);

struct SphericalVelocity {
    double theta1_dot = 0.0;
    double theta2_dot = 0.0;
    std::optional<double> phi1_dot;  // empty at a pole
    std::optional<double> phi2_dot;

    /// Throws PoleSingularity when either phi rate is undefined.
    std::pair<double, double> phi_dots() const;
};

/// theta' = 0, phi1' = phi2' = -c/2 (sin^2(t1/2) + sin^2(t2/2)) - (w2 + w3)/2.
SphericalVelocity spherical_velocity_ex1(const BlochPoint& bp, const EnergySpectrum& spec);

/// Sphere-form equations for the disentangled model. phi rates are empty
/// when sin(theta_i) < kPoleTol.
SphericalVelocity spherical_velocity_ex3(const BlochPoint& bp, const EnergySpectrum& spec);

struct FixedAngles {
    double theta2 = 0.0;
    std::optional<double> phi2;  // required for the disentangled model
};

enum class SampleFlag { Ok = 0, Pole = 1, Undefined = 2 };

struct FieldSample {
    double theta1 = 0.0;
    double phi1 = 0.0;
    double theta1_dot = 0.0;
    std::optional<double> phi1_dot;
    SampleFlag flag = SampleFlag::Ok;
};

struct FieldGrid {
    ModelId model = ModelId::TwoSpinProduct;
    FixedAngles fixed;
    int n_theta = 0;
    int n_phi = 0;
    std::vector<FieldSample> samples;  // row-major: theta outer, phi inner

    const FieldSample& at(int i_theta, int j_phi) const { return samples[i_theta * n_phi + j_phi]; }
};

/// theta1 grid: pi i / (n_theta - 1), poles included.
/// phi1 grid:   -pi + 2 pi (j + 1) / n_phi, so the last column is pi.
double grid_theta(int i, int n_theta);
double grid_phi(int j, int n_phi);

/// Samples (theta1', phi1') on a uniform grid with the second sphere fixed.
/// Throws DomainError for n_theta < 2, n_phi < 2, or invalid fixed angles.
FieldGrid field_grid(ModelId model, const EnergySpectrum& spec, const FixedAngles& fixed, int n_theta,
                     int n_phi);

}  // namespace qcons
