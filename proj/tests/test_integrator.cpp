#include "oracles.hpp"

#include "qcons/errors.hpp"
#include "qcons/integrator.hpp"
#include "qcons/models.hpp"
#include "qcons/sampling.hpp"

#include <doctest.h>

using namespace qcons;
using oracle::max_abs;
using oracle::point;

namespace {

IntegratorConfig rk4(double dt, double t_end) {
    IntegratorConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    return cfg;
}

// q1 = q2 and p1 = p2 on a three-level system; omega^{12} = 2 everywhere.
// `fence` makes the values throw ChartSingularity once q1 passes it.
ConstraintSet diagonal_pair(double fence = 1e300) {
    return ConstraintSet(
        3,
        [fence](const Vec& x) {
            if (x[0] > fence) throw ChartSingularity("fence");
            return Vec{{wrap_angle(x[0] - x[1]), x[2] - x[3]}};
        },
        [](const Vec&) { return Mat{{1, -1, 0, 0}, {0, 0, 1, -1}}; }, {"q1-q2", "p1-p2"}, {true, false});
}

// Same surface, but the p-gradient is scaled by (1 - q1) so the reduction
// degenerates at q1 = 1.
ConstraintSet fading_pair() {
    return ConstraintSet(
        3, [](const Vec& x) { return Vec{{wrap_angle(x[0] - x[1]), (1 - x[0]) * (x[2] - x[3])}}; },
        [](const Vec& x) {
            return Mat{{1, -1, 0, 0}, {-(x[2] - x[3]), 0, 1 - x[0], -(1 - x[0])}};
        },
        {"q1-q2", "p1-p2"}, {true, false});
}

// Phi^1 = q1 q2 - c, Phi^2 = p1 p2 - c: gradients vanish together at the origin.
ConstraintSet vanishing_gradients() {
    return ConstraintSet(
        3, [](const Vec& x) { return Vec{{x[0] * x[1] - 0.01, x[2] * x[3] - 0.01}}; },
        [](const Vec& x) { return Mat{{x[1], x[0], 0, 0}, {0, 0, x[3], x[2]}}; }, {"q1q2", "p1p2"},
        {false, false});
}

double endpoint_error_vs_reference(const ConstraintSet& cs, const EnergySpectrum& spec,
                                   const PhasePoint& pt0, double dt, const Vec& reference, double t_end) {
    IntegratorConfig cfg = rk4(dt, t_end);
    cfg.drift_tol = 1e-3;
    const auto traj = integrate(cs, spec, pt0, cfg);
    CAPTURE(traj.message);
    REQUIRE(traj.completed());
    return max_abs(Vec(to_coords(traj.back()) - reference));
}

}  // namespace

TEST_CASE("config validation") {
    IntegratorConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.dt = 0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.t_end = -1;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.drift_tol = 0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("unconstrained flow is integrated exactly") {
    const auto spec = oracle::omega({4, 3, 1});
    const auto pt0 = point({0.1, -0.2, 0.3}, {0.2, 0.3, 0.1});
    const auto traj = integrate(ModelId::Unconstrained, spec, pt0, rk4(1e-2, 1.0));
    REQUIRE(traj.completed());
    CHECK(traj.times.back() == 1.0);
    CHECK(traj.size() == 101);
    const auto exact = unitary_flow(pt0, spec, 1.0);
    CHECK(max_abs(Vec(traj.back().q - exact.q)) < 1e-12);
    CHECK(traj.back().p == pt0.p);
}

TEST_CASE("two-spin product flow follows the closed form") {
    const auto spec = oracle::omega({0, 0.5, -2.5});
    const auto pt0 = point({0.3, 0.1, 0.2}, {0.25, 0.25, 0.25});
    const auto traj = integrate(ModelId::TwoSpinProduct, spec, pt0, rk4(1e-3, 10.0));
    REQUIRE(traj.completed());
    const Vec qdot = closed_form_velocity_ex1(pt0, spec).head(3);
    double p_drift = 0.0, q_err = 0.0, e_drift = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        p_drift = std::max(p_drift, max_abs(Vec(traj.points[k].p - pt0.p)));
        q_err = std::max(q_err, max_abs(Vec(traj.points[k].q - pt0.q - qdot * traj.times[k])));
        e_drift = std::max(e_drift, std::abs(traj.energies[k] - traj.energies[0]));
    }
    CHECK(p_drift < 1e-8);
    CHECK(q_err < 1e-6);
    CHECK(e_drift < 1e-8);
    CHECK(traj.times.back() == 10.0);
    for (std::size_t k = 1; k < traj.size(); ++k) CHECK(traj.times[k] > traj.times[k - 1]);
}

TEST_CASE("trajectory diagnostics have matching lengths") {
    Rng rng(3);
    const auto spec = random_generic_spectrum(4, rng);
    const auto pt0 = sample_on_surface(ModelId::TwoSpinProduct, rng);
    const auto traj = integrate(ModelId::TwoSpinProduct, spec, pt0, rk4(0.01, 0.5));
    CHECK(traj.points.size() == traj.size());
    CHECK(traj.energies.size() == traj.size());
    CHECK(traj.residuals.size() == traj.size());
    CHECK(traj.multipliers.size() == traj.size());
    CHECK(traj.constraint_values.size() == traj.size());
    CHECK(max_abs(Vec(traj.multipliers[0] - lagrange_multipliers(two_spin_product_constraints(), pt0, spec))) <
          1e-14);
}

TEST_CASE("disentangled flow stays on the surface and conserves energy") {
    Rng rng(5);
    const auto spec = oracle::omega({0, 0.5, -2.5});
    PhasePoint pt0;
    do {
        pt0 = sample_on_surface(ModelId::TwoSpinDisentangled, rng);
    } while (pt0.p[0] * pt0.p_last() < 0.01);
    IntegratorConfig cfg = rk4(1e-4, 5.0);
    const auto traj = integrate(ModelId::TwoSpinDisentangled, spec, pt0, cfg);
    REQUIRE(traj.completed());
    double e_drift = 0.0;
    for (double e : traj.energies) e_drift = std::max(e_drift, std::abs(e - traj.energies[0]));
    CHECK(*std::max_element(traj.residuals.begin(), traj.residuals.end()) < 1e-6);
    CHECK(e_drift < 1e-8);
}

TEST_CASE("threshold projection keeps the residual at the threshold") {
    Rng rng(6);
    const auto spec = oracle::omega({0, 0.5, -2.5});
    PhasePoint pt0;
    do {
        pt0 = sample_on_surface(ModelId::TwoSpinDisentangled, rng);
    } while (pt0.p[0] * pt0.p_last() < 0.01);
    IntegratorConfig cfg = rk4(1e-2, 5.0);
    cfg.projection = ProjectionMode::Threshold;
    cfg.projection_threshold = 1e-11;
    const auto traj = integrate(ModelId::TwoSpinDisentangled, spec, pt0, cfg);
    REQUIRE(traj.completed());
    CHECK(*std::max_element(traj.residuals.begin(), traj.residuals.end()) < 1e-10);
    CHECK(traj.projections > 0);

    cfg.projection = ProjectionMode::EveryStep;
    const auto every = integrate(ModelId::TwoSpinDisentangled, spec, pt0, cfg);
    REQUIRE(every.completed());
    CHECK(*std::max_element(every.residuals.begin(), every.residuals.end()) < 1e-12);
}

TEST_CASE("adaptive scheme") {
    Rng rng(8);
    const auto spec = oracle::omega({0, 0.5, -2.5});
    PhasePoint pt0;
    do {
        pt0 = sample_on_surface(ModelId::TwoSpinDisentangled, rng);
    } while (pt0.p[0] * pt0.p_last() < 0.01);
    IntegratorConfig cfg;
    cfg.scheme = Scheme::RK45;
    cfg.dt = 1e-2;
    cfg.t_end = 2.0;
    cfg.tolerance = 1e-12;
    const auto adaptive = integrate(ModelId::TwoSpinDisentangled, spec, pt0, cfg);
    REQUIRE(adaptive.completed());
    CHECK(adaptive.times.back() == 2.0);
    const auto fine = integrate(ModelId::TwoSpinDisentangled, spec, pt0, rk4(1e-4, 2.0));
    CHECK(max_abs(Vec(to_coords(adaptive.back()) - to_coords(fine.back()))) < 1e-8);
}

TEST_CASE("RK4 is fourth order on a state-dependent field") {
    Rng rng(10);
    const auto cs = disentangled_constraints();
    const auto spec = oracle::omega({0, 0.5, -2.5});
    PhasePoint pt0;
    do {
        pt0 = sample_on_surface(ModelId::TwoSpinDisentangled, rng);
    } while (pt0.p[0] * pt0.p_last() < 0.02);
    const double t_end = 2.0;
    const auto ref = integrate(cs, spec, pt0, rk4(1e-4, t_end));
    REQUIRE(ref.completed());
    const Vec x_ref = to_coords(ref.back());
    const double e1 = endpoint_error_vs_reference(cs, spec, pt0, 0.04, x_ref, t_end);
    const double e2 = endpoint_error_vs_reference(cs, spec, pt0, 0.02, x_ref, t_end);
    CAPTURE(e1);
    CAPTURE(e2);
    CHECK(e1 / e2 >= 8.0);
    CHECK(e1 / e2 <= 32.0);
}

TEST_CASE("identical inputs give bit-identical trajectories") {
    Rng rng(12);
    const auto spec = random_generic_spectrum(4, rng);
    const auto pt0 = sample_on_surface(ModelId::TwoSpinDisentangled, rng);
    const auto a = integrate(ModelId::TwoSpinDisentangled, spec, pt0, rk4(1e-3, 0.5));
    const auto b = integrate(ModelId::TwoSpinDisentangled, spec, pt0, rk4(1e-3, 0.5));
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a.times[k] == b.times[k]);
        CHECK(to_coords(a.points[k]) == to_coords(b.points[k]));
    }
}

TEST_CASE("off-surface and degenerate starts are rejected") {
    const auto spec = oracle::omega({0, 0.5, -2.5});
    CHECK_THROWS_AS(integrate(ModelId::TwoSpinProduct, spec, point({0.3, 0.1, 0.2}, {0.5, 0.25, 0.125}),
                              rk4(1e-3, 1.0)),
                    DomainError);
    CHECK_THROWS_AS(integrate(fading_pair(), oracle::omega({1, 2}), point({1, 1}, {0.3, 0.3}), rk4(1e-3, 1.0)),
                    SingularOmega);
}

TEST_CASE("mid-run failures truncate the trajectory with a status") {
    const auto spec = oracle::omega({1.0, 3.0});
    const auto pt0 = point({0, 0}, {0.3, 0.3});

    const auto fenced = integrate(diagonal_pair(0.5), spec, pt0, rk4(1e-2, 2.0));
    CHECK(fenced.status == RunStatus::ChartSingularity);
    CHECK(fenced.size() > 1);
    CHECK(fenced.times.back() < 2.0);
    CHECK(fenced.back().q[0] <= 0.5);

    const auto fading = integrate(fading_pair(), spec, pt0, rk4(1e-2, 2.0));
    CHECK(fading.status == RunStatus::SingularOmega);
    CHECK(fading.times.back() < 2.0);
    CHECK(status_name(fading.status) == "singular_omega");
}

TEST_CASE("drift beyond the limit stops an unprojected run") {
    // Gradients that disagree with the values let the flow leave the surface.
    const ConstraintSet skewed(
        3, [](const Vec& x) { return Vec{{x[0] - x[1], x[2] - x[3]}}; },
        [](const Vec&) { return Mat{{1, -0.5, 0, 0}, {0, 0, 1, -1}}; }, {"a", "b"}, {false, false});
    IntegratorConfig cfg = rk4(1e-2, 5.0);
    cfg.drift_tol = 1e-6;
    const auto traj = integrate(skewed, oracle::omega({1.0, 3.0}), point({0, 0}, {0.3, 0.3}), cfg);
    CHECK(traj.status == RunStatus::DriftExceeded);
    CHECK(traj.residuals.back() > 1e-3);
}

TEST_CASE("projection onto the surface") {
    const auto cs = two_spin_product_constraints();
    const auto on = point({0.3, 0.1, 0.2}, {0.25, 0.25, 0.25});
    const auto fixed = project_onto_surface(cs, on, 1e-12);
    CHECK(fixed.iterations == 0);
    CHECK(to_coords(fixed.point) == to_coords(on));

    auto off = on;
    off.p[1] += 1e-4;
    const auto proj = project_onto_surface(cs, off, 1e-13);
    CHECK(std::abs(cs.values(proj.point)[1]) < 1e-12);
    const double moved = max_abs(Vec(proj.point.p - off.p));
    CHECK(moved > 1e-5);
    CHECK(moved < 1e-3);
    CHECK(proj.iterations <= kMaxNewtonIterations);

    CHECK_THROWS_AS(project_onto_surface(vanishing_gradients(), point({0, 0}, {0, 0}), 1e-12), ProjectionFailed);
}

TEST_CASE("projected points keep a tangent velocity") {
    Rng rng(14);
    const auto cs = disentangled_constraints();
    const auto spec = random_generic_spectrum(4, rng);
    for (int k = 0; k < 20; ++k) {
        auto pt = sample_on_surface(ModelId::TwoSpinDisentangled, rng, 4, 1e-2);
        pt.p[1] += 1e-5;
        pt.q[0] -= 1e-5;
        const auto proj = project_onto_surface(cs, pt, 1e-13);
        CHECK(max_abs(Vec(cs.gradients(proj.point) * constrained_velocity(cs, proj.point, spec))) < 1e-9);
    }
}

TEST_CASE("flow comparison") {
    const auto pt0 = point({0.3, 0.1, 0.2}, {0.25, 0.25, 0.25});

    const auto same = compare_flows(ModelId::TwoSpinProduct, EnergySpectrum::from_levels({2, 1, -1, -2}), pt0,
                                    rk4(1e-3, 10.0));
    CHECK(same.condition_holds);
    CHECK(same.predicted_zero);
    CHECK(same.max_divergence < 1e-10);

    const auto fig = oracle::omega({0, 0.5, -2.5});
    const auto apart = compare_flows(ModelId::TwoSpinProduct, fig, pt0, rk4(1e-3, 10.0));
    CHECK_FALSE(apart.condition_holds);
    const double rate = max_abs(Vec(closed_form_velocity_ex1(pt0, fig) - canonical_omega(4) * hamiltonian_gradient(fig)));
    CHECK(apart.initial_rate == doctest::Approx(rate).epsilon(1e-12));
    CHECK(apart.observed_rate == doctest::Approx(rate).epsilon(1e-8));
    for (std::size_t k = 0; k < apart.times.size(); ++k)
        CHECK(std::abs(apart.divergence[k] - rate * apart.times[k]) < 1e-8);

    const auto still = compare_flows(ModelId::TwoSpinProduct, fig, pt0, rk4(1e-3, 0.0));
    CHECK(still.max_divergence == 0.0);
    CHECK(still.times.size() == 1);
}

TEST_CASE("three-spin product flow is quasi-unitary") {
    Rng rng(16);
    const auto spec = random_generic_spectrum(8, rng);
    const auto pt0 = sample_on_surface(ModelId::ThreeSpinProduct, rng, 8);
    const auto traj = integrate(ModelId::ThreeSpinProduct, spec, pt0, rk4(1e-3, 2.0));
    REQUIRE(traj.completed());
    const Vec qdot = constrained_velocity(three_spin_product_constraints(), pt0, spec).head(7);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        CHECK(max_abs(Vec(traj.points[k].p - pt0.p)) < 1e-8);
        CHECK(max_abs(Vec(traj.points[k].q - pt0.q - qdot * traj.times[k])) < 1e-6);
    }
    CHECK(*std::max_element(traj.residuals.begin(), traj.residuals.end()) < 1e-10);
}
