#include "qcons/sampling.hpp"

#include "qcons/bloch.hpp"
#include "qcons/errors.hpp"

#include <cmath>
#include <array>
#include <numbers>
#include <vector>

namespace qcons {

namespace {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Eigen::Vector2cd random_spinor(Rng& rng) {
    std::normal_distribution<double> n01;
    Eigen::Vector2cd v(std::complex<double>(n01(rng), n01(rng)), std::complex<double>(n01(rng), n01(rng)));
    return v.normalized();
}

}  // namespace

PhasePoint random_interior_point(int n_levels, Rng& rng, double margin) {
    const int m = n_levels - 1;
    // Exponential weights give a uniform draw on the simplex; shrink to keep
    // a margin on every face.
    std::exponential_distribution<double> ex(1.0);
    Vec w(n_levels);
    for (int i = 0; i < n_levels; ++i) w[i] = ex(rng);
    w /= w.sum();
    const double scale = 1.0 - n_levels * margin;
    PhasePoint pt{Vec(m), Vec(m)};
    for (int i = 0; i < m; ++i) {
        pt.p[i] = margin + scale * w[i];
        pt.q[i] = uniform(rng, -std::numbers::pi, std::numbers::pi);
    }
    return pt;
}

PhasePoint sample_on_surface(ModelId model, Rng& rng, int n_levels, double min_p1p4) {
    switch (model) {
        case ModelId::TwoSpinProduct:
            for (;;) {
                const double p2 = uniform(rng, 0.02, 0.45);
                const double p3 = uniform(rng, 0.02, 0.45);
                const double s = 1.0 - p2 - p3;
                const double disc = s * s - 4.0 * p2 * p3;
                if (disc <= 0.0) continue;
                const double root = std::sqrt(disc);
                const double p1 = (uniform(rng, 0.0, 1.0) < 0.5) ? 0.5 * (s - root) : 0.5 * (s + root);
                const double p4 = 1.0 - p1 - p2 - p3;
                if (p1 < 1e-3 || p4 < 1e-3) continue;
                const double q2 = uniform(rng, -std::numbers::pi, std::numbers::pi);
                const double q3 = uniform(rng, -std::numbers::pi, std::numbers::pi);
                PhasePoint pt{Vec(3), Vec(3)};
                pt.q << q2 + q3, q2, q3;
                pt.p << p1, p2, p3;
                return pt;
            }
        case ModelId::ThreeSpinProduct:
            for (;;) {
                const HilbertVector v =
                    three_spin_product(random_spinor(rng), random_spinor(rng), random_spinor(rng));
                if (std::abs(v.amps[7]) < 0.05) continue;
                return hilbert_to_phase(v);
            }
        case ModelId::TwoSpinDisentangled:
            for (;;) {
                const BlochPoint bp{uniform(rng, 0.0, std::numbers::pi),
                                    uniform(rng, -std::numbers::pi, std::numbers::pi),
                                    uniform(rng, 0.0, std::numbers::pi),
                                    uniform(rng, -std::numbers::pi, std::numbers::pi)};
                const HilbertVector v = product_state(bp);
                if (std::abs(v.amps[0]) < 0.05) continue;
                const PhasePoint pt = ex3_basis_unmap(v);
                if (pt.p[0] * pt.p_last() > min_p1p4) return pt;
            }
        case ModelId::Unconstrained:
            return random_interior_point(n_levels, rng);
    }
    throw DomainError("unknown model");
}

EnergySpectrum random_condition_spectrum(ModelId model, Rng& rng) {
    switch (model) {
        case ModelId::TwoSpinProduct:
        case ModelId::TwoSpinDisentangled:
            for (;;) {
                const double e1 = uniform(rng, -3.0, 3.0);
                const double e2 = uniform(rng, -3.0, 3.0);
                try {
                    return EnergySpectrum::from_levels({e1, e2, -e2, -e1});
                } catch (const DegenerateSpectrum&) {
                }
            }
        case ModelId::ThreeSpinProduct:
            for (;;) {
                const double a = uniform(rng, -2.0, 2.0);
                const double b = uniform(rng, -2.0, 2.0);
                const double c = uniform(rng, -2.0, 2.0);
                // Patterns 000, 001, 010, 100, 011, 101, 110, 111; bit set -> minus sign.
                static constexpr std::array<std::array<int, 3>, 8> patterns = {{
                    {0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}, {1, 1, 1}}};
                std::vector<double> levels;
                for (const auto& s : patterns) {
                    levels.push_back((s[0] ? -a : a) + (s[1] ? -b : b) + (s[2] ? -c : c));
                }
                try {
                    return EnergySpectrum::from_levels(std::move(levels));
                } catch (const DegenerateSpectrum&) {
                }
            }
        case ModelId::Unconstrained:
            break;
    }
    throw DomainError("no spectrum condition for this model");
}

EnergySpectrum random_generic_spectrum(int n_levels, Rng& rng) {
    for (;;) {
        std::vector<double> levels(n_levels);
        for (double& e : levels) e = uniform(rng, -3.0, 3.0);
        bool separated = true;
        for (int i = 0; i < n_levels && separated; ++i)
            for (int j = 0; j < i; ++j)
                if (std::abs(levels[i] - levels[j]) < 1e-3) separated = false;
        if (separated) return EnergySpectrum::from_levels(std::move(levels));
    }
}

}  // namespace qcons
