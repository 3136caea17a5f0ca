#include "oracles.hpp"

#include "qcons/errors.hpp"
#include "qcons/sampling.hpp"

#include <doctest.h>

#include <complex>

using namespace qcons;
using oracle::pi;
using oracle::point;

TEST_CASE("spectrum construction") {
    const auto spec = EnergySpectrum::from_levels({2, 1, -1, -2});
    CHECK(spec.n_levels() == 4);
    CHECK(spec.frequencies().isApprox(Vec{{4.0, 3.0, 1.0}}));
    CHECK(spec.ground() == -2);

    CHECK_THROWS_AS(EnergySpectrum::from_levels({0.5, 1.0, -2.0, 0.5}), DegenerateSpectrum);
    CHECK_THROWS_AS(EnergySpectrum::from_levels({1.0}), DomainError);
    CHECK_NOTHROW(EnergySpectrum::from_levels({0.5, 1.0, -2.0, 0.5001}));

    const auto fig = oracle::omega({0, 0.5, -2.5});
    CHECK(fig.n_levels() == 4);
    CHECK(fig.frequencies() == Vec{{0.0, 0.5, -2.5}});
}

TEST_CASE("build_state examples") {
    const auto s0 = build_state(point({0}, {0}), 2);
    CHECK(std::abs(s0.amps[0]) == 0.0);
    CHECK(s0.amps[1] == std::complex<double>(1, 0));

    const auto s1 = build_state(point({0}, {1}), 2);
    CHECK(s1.amps[0] == std::complex<double>(1, 0));
    CHECK(std::abs(s1.amps[1]) == 0.0);

    const auto s4 = build_state(point({0, 0, 0}, {0.25, 0.25, 0.25}), 4);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(s4.amps[i] - 0.5) < 1e-15);

    const auto phased = build_state(point({0.7}, {0.5}), 2);
    CHECK(std::abs(phased.amps[0] - std::sqrt(0.5) * std::polar(1.0, -0.7)) < 1e-15);
}

TEST_CASE("build_state rejects points outside the simplex") {
    CHECK_THROWS_AS(build_state(point({0, 0}, {-0.1, 0.5}), 3), DomainError);
    CHECK_THROWS_AS(build_state(point({0, 0}, {0.7, 0.5}), 3), DomainError);
    CHECK_THROWS_AS(build_state(point({0, 0}, {0.5, 0.5}), 4), DimensionError);
    CHECK_NOTHROW(build_state(point({0, 0}, {0.5, 0.5}), 3));
}

TEST_CASE("hilbert_to_phase examples") {
    HilbertVector v{CVec::Constant(4, 0.5)};
    const auto pt = hilbert_to_phase(v);
    CHECK(oracle::max_abs(pt.q) < 1e-15);
    CHECK(oracle::max_abs(Vec(pt.p.array() - 0.25)) < 1e-15);

    const double r = 1 / std::sqrt(2.0);
    HilbertVector w{CVec{{std::complex<double>(0, r), 0, 0, r}}};
    const auto pw = hilbert_to_phase(w);
    CHECK(pw.q[0] == doctest::Approx(-pi / 2).epsilon(1e-14));
    CHECK(pw.p[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(pw.p[1] == 0.0);
    CHECK(pw.p[2] == 0.0);

    HilbertVector chart_edge{CVec{{1, 0}}};
    CHECK_THROWS_AS(hilbert_to_phase(chart_edge), PhaseUndefined);
    HilbertVector unnormalised{CVec{{1, 1}}};
    CHECK_THROWS_AS(hilbert_to_phase(unnormalised), DomainError);
}

TEST_CASE("round trip through Hilbert space") {
    Rng rng(11);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 7;
        CVec a(n);
        for (int i = 0; i < n; ++i) a[i] = {g(rng), g(rng)};
        a /= a.norm();
        a *= std::polar(1.0, -std::arg(a[n - 1]));  // |E_n> amplitude real positive
        const HilbertVector v{a};
        const auto back = build_state(hilbert_to_phase(v), n);
        CHECK((back.amps - a).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("unit norm and phase/state inverse at random points") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 7;
        auto pt = random_interior_point(n, rng, 1e-3);
        pt.q.array() += 10.0 * (trial % 3 - 1);  // unwrapped angles
        const auto v = build_state(pt, n);
        CHECK(std::abs(v.amps.norm() - 1.0) < 1e-12);
        const auto back = hilbert_to_phase(v);
        CHECK(oracle::max_abs(Vec(back.p - pt.p)) < 1e-10);
        for (int i = 0; i < n - 1; ++i) CHECK(std::abs(wrap_angle(back.q[i] - pt.q[i])) < 1e-10);
    }
}

TEST_CASE("hamiltonian value and gradient") {
    const auto spec = EnergySpectrum::from_levels({2, 1, -1, -2});
    CHECK(hamiltonian_value(point({0, 0, 0}, {0, 0, 0}), spec) == -2.0);
    CHECK(hamiltonian_value(point({0, 0, 0}, {1, 0, 0}), spec) == 2.0);
    CHECK(hamiltonian_value(point({0.3, -1, 2}, {0, 0, 1}), spec) == -1.0);

    const Vec expected{{0, 0, 0, 4, 3, 1}};
    CHECK(hamiltonian_gradient(point({0, 0, 0}, {0.1, 0.2, 0.3}), spec) == expected);
    CHECK(hamiltonian_gradient(point({5, -2, 1}, {0.6, 0.0, 0.3}), spec) == expected);
    CHECK(hamiltonian_gradient(spec) == expected);
}

TEST_CASE("hamiltonian gradient agrees with finite differences") {
    Rng rng(5);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 7;
        const auto spec = random_generic_spectrum(n, rng);
        const Vec x = to_coords(random_interior_point(n, rng));
        const Vec fd = oracle::fd_gradient(
            [&](const Vec& y) { return hamiltonian_value(from_coords(y), spec); }, x);
        worst = std::max(worst, oracle::max_abs(Vec(fd - hamiltonian_gradient(spec))));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("canonical omega") {
    CHECK(canonical_omega(2) == Mat{{0, 1}, {-1, 0}});
    const Mat o = canonical_omega(4);
    Mat expected = Mat::Zero(6, 6);
    expected.topRightCorner(3, 3) = Mat::Identity(3, 3);
    expected.bottomLeftCorner(3, 3) = -Mat::Identity(3, 3);
    CHECK(o == expected);
    for (int n = 2; n <= 8; ++n) {
        const Mat w = canonical_omega(n);
        CHECK(w * w.transpose() == Mat::Identity(2 * n - 2, 2 * n - 2));
        CHECK(w * w == -Mat::Identity(2 * n - 2, 2 * n - 2));
        CHECK(w.transpose() == -w);
    }
}

TEST_CASE("unitary flow") {
    const auto spec = EnergySpectrum::from_levels({2, 1, -1, -2});
    const auto pt0 = point({0, 0, 0}, {0.2, 0.3, 0.1});
    const auto at0 = unitary_flow(pt0, spec, 0.0);
    CHECK(at0.q == pt0.q);
    CHECK(at0.p == pt0.p);

    const auto at1 = unitary_flow(pt0, spec, 1.0);
    CHECK(at1.q == Vec{{4, 3, 1}});
    CHECK(at1.p == pt0.p);
    CHECK(hamiltonian_value(at1, spec) == hamiltonian_value(pt0, spec));

    const auto composed = unitary_flow(unitary_flow(pt0, spec, 0.75), spec, 1.25);
    const auto direct = unitary_flow(pt0, spec, 2.0);
    CHECK(oracle::max_abs(Vec(composed.q - direct.q)) < 1e-14);
}

TEST_CASE("velocity from the canonical structure is Hamilton's equations") {
    const auto spec = EnergySpectrum::from_levels({2, 1, -1, -2});
    const Vec v = canonical_omega(4) * hamiltonian_gradient(spec);
    CHECK(v == Vec{{4, 3, 1, 0, 0, 0}});
}

TEST_CASE("wrap_angle maps into (-pi, pi]") {
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(pi) == doctest::Approx(pi));
    CHECK(wrap_angle(-pi) == doctest::Approx(pi));
    CHECK(wrap_angle(3 * pi / 2) == doctest::Approx(-pi / 2));
    CHECK(wrap_angle(2 * pi + 0.1) == doctest::Approx(0.1));
}
