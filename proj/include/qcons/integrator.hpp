#pragma once

#include "qcons/dirac.hpp"
#include "qcons/models.hpp"

#include <string>
#include <vector>

namespace qcons {

enum class Scheme { RK4, RK45 };

enum class ProjectionMode { Off, EveryStep, Threshold };

struct IntegratorConfig {
    Scheme scheme = Scheme::RK4;
    double dt = 1e-3;          // fixed step, or initial step for RK45
    double t_end = 1.0;
    double tolerance = 1e-10;  // RK45 local error target (mixed abs/rel)
    ProjectionMode projection = ProjectionMode::Off;
    double projection_threshold = 1e-11;  // trigger for Threshold mode
    double projection_tol = 1e-13;        // Newton target residual
    double drift_tol = 1e-8;
    double singularity_floor = 1e-12;

    void validate() const;
};

enum class RunStatus { Completed, SingularOmega, ChartSingularity, ProjectionFailed, DriftExceeded };

std::string_view status_name(RunStatus s);

struct Trajectory {
    std::vector<double> times;
    std::vector<PhasePoint> points;
    std::vector<double> energies;
    std::vector<double> residuals;            // max |Phi^alpha|
    std::vector<Vec> constraint_values;       // Phi^alpha per sample
    std::vector<Vec> multipliers;
    RunStatus status = RunStatus::Completed;
    std::string message;
    int projections = 0;

    std::size_t size() const { return times.size(); }
    bool completed() const { return status == RunStatus::Completed; }
    const PhasePoint& back() const { return points.back(); }
};

/// Integrates x' = Omega~ grad H from pt0. Throws DomainError if pt0 is off the
/// surface by more than drift_tol and SingularOmega if the reduction fails at
/// pt0; failures later in the run truncate the trajectory and set status.
Trajectory integrate(const ConstraintSet& cs, const EnergySpectrum& spec, const PhasePoint& pt0,
                     const IntegratorConfig& cfg);
Trajectory integrate(ModelId model, const EnergySpectrum& spec, const PhasePoint& pt0,
                     const IntegratorConfig& cfg);

inline constexpr int kMaxNewtonIterations = 20;

struct ProjectionResult {
    PhasePoint point;
    int iterations = 0;
    double residual = 0.0;
};

/// Minimum-norm Newton iteration x <- x - G^T (G G^T)^{-1} Phi until
/// max |Phi| < tol. Throws ProjectionFailed on a rank-deficient Jacobian or
/// after kMaxNewtonIterations.
ProjectionResult project_onto_surface(const ConstraintSet& cs, const PhasePoint& pt, double tol);

struct FlowComparison {
    std::vector<double> times;
    std::vector<double> divergence;  // sup-norm distance to the unitary flow
    double max_divergence = 0.0;
    double initial_rate = 0.0;       // ||v_constrained - v_unitary||_inf at pt0
    double observed_rate = 0.0;      // divergence(t_end) / t_end
    bool condition_holds = false;
    bool predicted_zero = false;
    RunStatus status = RunStatus::Completed;
};

FlowComparison compare_flows(ModelId model, const EnergySpectrum& spec, const PhasePoint& pt0,
                             const IntegratorConfig& cfg);

}  // namespace qcons
