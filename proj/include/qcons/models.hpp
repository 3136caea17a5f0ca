#pragma once

// The worked constraint systems: two and three spin-1/2 particles confined
// to the product (Segre) variety that contains the energy eigenstates, and
// two spins confined to disentangled states of a Heisenberg pair.

#include "qcons/dirac.hpp"
#include "qcons/phase_space.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace qcons {

enum class ModelId { TwoSpinProduct, ThreeSpinProduct, TwoSpinDisentangled, Unconstrained };

/// CLI names: two-spin-product, three-spin-product, two-spin-disentangled, unconstrained.
std::string_view model_name(ModelId id);
std::optional<ModelId> parse_model(std::string_view name);

/// 4, 8, 4 for the spin models; nullopt for Unconstrained (any n >= 2).
std::optional<int> model_levels(ModelId id);

/// Constraint set for a model; n_levels is only consulted for Unconstrained.
ConstraintSet model_constraints(ModelId id, int n_levels, double singularity_floor = 1e-12);

// --- two spins, product space containing the eigenstates -------------------

/// Phi1 = wrap(q1 - q2 - q3), Phi2 = p1 p4 - p2 p3 with p4 = 1 - p1 - p2 - p3.
ConstraintSet two_spin_product_constraints();

/// Real and imaginary parts of psi1 psi4 - psi2 psi3 in action-angle form:
///   sqrt(p1 p4) cos q1 - sqrt(p2 p3) cos(q2 + q3),
///   sqrt(p1 p4) sin q1 - sqrt(p2 p3) sin(q2 + q3).
Eigen::Vector2d raw_quadric_residual(const PhasePoint& pt);

/// Right-hand sides of the reduced equations for the two-spin product model:
/// p' = 0 and q' linear in p with the mismatch c = w1 - w2 - w3.
Vec closed_form_velocity_ex1(const PhasePoint& pt, const EnergySpectrum& spec);

/// q-p block of the correction tensor for the two-spin product model:
///   [[p1 - p4, p4 - p1, p4 - p1],
///    [p1 + p3, -p1 - p3, -p1 - p3],
///    [p1 + p2, -p1 - p2, -p1 - p2]].
Mat closed_form_lambda_block_ex1(const PhasePoint& pt);

// --- three spins ------------------------------------------------------------

/// Four wrapped angle relations and four bilinear population relations,
/// p8 = 1 - sum_{i<=7} p_i.
ConstraintSet three_spin_product_constraints();

/// Product state (a) x (b) x (c) written in the level labelling used by the
/// three-spin constraints: levels 1..8 correspond to the spin patterns
/// 000, 001, 010, 100, 011, 101, 110, 111 (0 = first basis vector).
HilbertVector three_spin_product(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b,
                                 const Eigen::Vector2cd& c);

// --- two spins, disentangled states of the Heisenberg pair ------------------

/// Phi1 = 2 sqrt(p1 p4) - p2 cos(2 q2 - q1) + p3 cos(2 q3 - q1),
/// Phi2 = p2 sin(2 q2 - q1) - p3 sin(2 q3 - q1).
/// Evaluation throws ChartSingularity when p1 p4 < floor.
ConstraintSet disentangled_constraints(double singularity_floor = 1e-12);

/// Printed closed form for the disentangled model, coordinate order
/// (q1', q2', q3', p1', p2', p3'). Throws ChartSingularity when p1 p4 <= 1e-12.
Vec closed_form_velocity_ex3(const PhasePoint& pt, const EnergySpectrum& spec);

/// Eigenbasis -> product basis (|uu>, |ud>, |du>, |dd>):
///   |uu> <- E4, |dd> <- E1, triplet-0 <- E2, singlet <- E3.
HilbertVector ex3_basis_map(const PhasePoint& pt);

/// Inverse of ex3_basis_map for a unit vector in the product basis. The
/// global phase is fixed so the |uu> amplitude is real and positive.
/// Throws PhaseUndefined when that amplitude vanishes.
PhasePoint ex3_basis_unmap(const HilbertVector& product_amps);

// --- shared ----------------------------------------------------------------

/// Max modulus of the model's bilinear product-state relations.
double segre_membership(const HilbertVector& v, ModelId model);

/// Whether the unconstrained flow already preserves the model's surface.
bool spectrum_condition(const EnergySpectrum& spec, ModelId model);

struct HeisenbergParams {
    double J = 1.0;
    double B = 1.0;
};

/// Levels of -J s1.s2 - B (sz1 + sz2) ordered as
/// (|dd>, triplet-0, singlet, |uu>) = (-J + 2B, -J, 3J, -J - 2B).
EnergySpectrum heisenberg_spectrum(const HeisenbergParams& hp);

/// Matrix of the Heisenberg Hamiltonian in the (|uu>, |ud>, |du>, |dd>) basis.
Eigen::Matrix4d heisenberg_matrix(const HeisenbergParams& hp);

}  // namespace qcons
