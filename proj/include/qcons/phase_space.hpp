#pragma once

// Action-angle coordinates for pure states of an n-level system.
//
// A state is written in the energy eigenbasis as
//     psi_i = sqrt(p_i) exp(-i q_i),  i < n,
//     psi_n = sqrt(1 - sum p_i)       (real, non-negative),
// so that the expectation of H is E_n + sum (E_i - E_n) p_i and the
// Schroedinger flow is q_i' = omega_i, p_i' = 0.
//
// Every vector and matrix over phase space uses the flattened order
//     x = (q_1, ..., q_{n-1}, p_1, ..., p_{n-1}).

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace qcons {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;

/// Non-degenerate energy levels E_1..E_n. Frequencies omega_i = E_i - E_n
/// are always derived from the stored levels.
class EnergySpectrum {
public:
    /// Validates n >= 2 and pairwise gaps >= 1e-12; throws DegenerateSpectrum.
    static EnergySpectrum from_levels(std::vector<double> levels);

    /// Builds a spectrum from raw frequencies omega_1..omega_{n-1} with
    /// E_n = ground. No distinctness check: the dynamics only see omega,
    /// and parameter sets with repeated levels (E_1 == E_n) are legitimate.
    static EnergySpectrum from_frequencies(std::span<const double> omega, double ground = 0.0);

    int n_levels() const { return static_cast<int>(levels_.size()); }
    const std::vector<double>& levels() const { return levels_; }
    Vec frequencies() const;
    double ground() const { return levels_.back(); }

private:
    explicit EnergySpectrum(std::vector<double> levels) : levels_(std::move(levels)) {}
    std::vector<double> levels_;
};

struct PhasePoint {
    Vec q;  // relative phases, unwrapped
    Vec p;  // populations of E_1..E_{n-1}

    int dim() const { return static_cast<int>(q.size()); }
    int n_levels() const { return dim() + 1; }
    double p_last() const { return 1.0 - p.sum(); }
};

struct HilbertVector {
    CVec amps;

    int size() const { return static_cast<int>(amps.size()); }
};

inline constexpr double kSimplexTol = 1e-12;

/// Throws DimensionError / DomainError if pt is not a valid point for n levels.
void validate(const PhasePoint& pt, int n_levels);

/// The single place where (q, p) is flattened into x.
Vec to_coords(const PhasePoint& pt);
PhasePoint from_coords(const Vec& x);

HilbertVector build_state(const PhasePoint& pt, int n_levels);

/// Inverse chart. Throws PhaseUndefined when |psi_n| <= 1e-12.
PhasePoint hilbert_to_phase(const HilbertVector& v);

double hamiltonian_value(const PhasePoint& pt, const EnergySpectrum& spec);

/// (0, ..., 0, omega_1, ..., omega_{n-1}); independent of the point.
Vec hamiltonian_gradient(const PhasePoint& pt, const EnergySpectrum& spec);
Vec hamiltonian_gradient(const EnergySpectrum& spec);

/// [[0, I], [-I, 0]] of size 2n-2.
Mat canonical_omega(int n_levels);

PhasePoint unitary_flow(const PhasePoint& pt0, const EnergySpectrum& spec, double t);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

}  // namespace qcons
