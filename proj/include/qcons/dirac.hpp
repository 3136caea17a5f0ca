#pragma once

// Dirac reduction of the unitary flow onto an algebraic constraint surface
// Phi^alpha(x) = 0. With G the N x (2n-2) matrix of constraint gradients
// (row alpha = grad Phi^alpha) and Omega the canonical structure:
//
//   omega      = G Omega G^T                 (N x N, antisymmetric)
//   lambda     = -omega^{-1} G Omega grad H  (Lagrange multipliers)
//   Lambda     = Omega G^T omega^{-1} G Omega^T
//   Omega~     = Omega + Lambda
//   x'         = Omega~ grad H
//
// Omega~ annihilates every constraint normal, so the velocity is tangent.

#include "qcons/phase_space.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qcons {

/// N constraint functions over flattened coordinates x with analytic
/// gradients. Residuals flagged as angular are reported wrapped into
/// (-pi, pi]; the value function is expected to do the wrapping itself.
class ConstraintSet {
public:
    using ValueFn = std::function<Vec(const Vec&)>;
    using GradFn = std::function<Mat(const Vec&)>;

    ConstraintSet(int n_levels, ValueFn values, GradFn gradients, std::vector<std::string> labels,
                  std::vector<bool> angular);

    /// N = 0 set over n levels: the engine reduces to the unitary flow.
    static ConstraintSet empty(int n_levels);

    int n_levels() const { return n_levels_; }
    int size() const { return static_cast<int>(labels_.size()); }
    const std::vector<std::string>& labels() const { return labels_; }
    bool is_angular(int alpha) const { return angular_[alpha]; }

    Vec values(const Vec& x) const;
    Mat gradients(const Vec& x) const;
    Vec values(const PhasePoint& pt) const { return values(to_coords(pt)); }
    Mat gradients(const PhasePoint& pt) const { return gradients(to_coords(pt)); }

    /// max_alpha |Phi^alpha(x)|, 0 when N = 0.
    double max_residual(const Vec& x) const;

private:
    int n_levels_;
    ValueFn values_;
    GradFn gradients_;
    std::vector<std::string> labels_;
    std::vector<bool> angular_;
};

struct ModifiedStructure {
    Mat omega_small;      // omega^{ab} over constraint indices
    Mat omega_small_inv;  // its inverse
    Mat lambda;           // correction tensor on phase space
    Mat omega_tilde;      // canonical + lambda
    Vec multipliers;
};

inline constexpr double kMaxOmegaCondition = 1e12;

Mat omega_matrix(const ConstraintSet& cs, const PhasePoint& pt);

/// Dense inverse with a condition-number guard; throws SingularOmega.
Mat invert_omega(const Mat& m);

Vec lagrange_multipliers(const ConstraintSet& cs, const PhasePoint& pt, const EnergySpectrum& spec);

Mat lambda_tensor(const ConstraintSet& cs, const PhasePoint& pt);

/// Full reduction at one point.
ModifiedStructure reduce(const ConstraintSet& cs, const PhasePoint& pt, const EnergySpectrum& spec);

/// Omega~ grad H.
Vec constrained_velocity(const ConstraintSet& cs, const PhasePoint& pt, const EnergySpectrum& spec);
Vec constrained_velocity(const ConstraintSet& cs, const Vec& x, const EnergySpectrum& spec);

/// Omega grad H + lambda_alpha Omega grad Phi^alpha, using the multiplier
/// route instead of the reduced structure.
Vec multiplier_velocity(const ConstraintSet& cs, const PhasePoint& pt, const EnergySpectrum& spec);

/// max_alpha || Omega~ grad Phi^alpha ||_inf. Zero for N = 0.
double annihilation_check(const ConstraintSet& cs, const PhasePoint& pt, const EnergySpectrum& spec);

struct GradientReport {
    std::vector<double> max_rel_error;  // one per constraint
    double worst = 0.0;
    int points_checked = 0;
};

inline constexpr double kGradientTolerance = 1e-5;

/// Compares analytic gradients with central differences (h = 1e-6).
/// Throws GradientMismatch if any relative error exceeds kGradientTolerance.
GradientReport validate_gradients(const ConstraintSet& cs, const std::vector<PhasePoint>& pts);

/// Same comparison without throwing.
GradientReport gradient_errors(const ConstraintSet& cs, const std::vector<PhasePoint>& pts,
                               double h = 1e-6);

}  // namespace qcons
