#include "qcons/phase_space.hpp"

#include "qcons/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace qcons {

namespace {

void require_dim(const PhasePoint& pt, const EnergySpectrum& spec) {
    if (pt.n_levels() != spec.n_levels() || pt.p.size() != pt.q.size()) {
        throw DimensionError("phase point has " + std::to_string(pt.n_levels()) +
                             " levels, spectrum has " + std::to_string(spec.n_levels()));
    }
}

}  // namespace

EnergySpectrum EnergySpectrum::from_levels(std::vector<double> levels) {
    if (levels.size() < 2) {
        throw DomainError("spectrum needs at least two levels");
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!std::isfinite(levels[i])) {
            throw DomainError("non-finite energy level");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(levels[i] - levels[j]) < 1e-12) {
                throw DegenerateSpectrum("levels E" + std::to_string(j + 1) + " and E" +
                                         std::to_string(i + 1) + " coincide");
            }
        }
    }
    return EnergySpectrum(std::move(levels));
}

EnergySpectrum EnergySpectrum::from_frequencies(std::span<const double> omega, double ground) {
    if (omega.empty()) {
        throw DomainError("need at least one frequency");
    }
    std::vector<double> levels;
    levels.reserve(omega.size() + 1);
    for (double w : omega) {
        if (!std::isfinite(w)) {
            throw DomainError("non-finite frequency");
        }
        levels.push_back(w + ground);
    }
    levels.push_back(ground);
    return EnergySpectrum(std::move(levels));
}

Vec EnergySpectrum::frequencies() const {
    const int m = n_levels() - 1;
    Vec w(m);
    for (int i = 0; i < m; ++i) {
        w[i] = levels_[i] - levels_.back();
    }
    return w;
}

void validate(const PhasePoint& pt, int n_levels) {
    if (pt.q.size() != pt.p.size() || pt.n_levels() != n_levels) {
        throw DimensionError("expected a phase point for " + std::to_string(n_levels) + " levels");
    }
    for (int i = 0; i < pt.dim(); ++i) {
        if (!std::isfinite(pt.q[i]) || !std::isfinite(pt.p[i])) {
            throw DomainError("non-finite phase-space coordinate");
        }
        if (pt.p[i] < -kSimplexTol) {
            throw DomainError("negative population p" + std::to_string(i + 1));
        }
    }
    if (pt.p.sum() > 1.0 + kSimplexTol) {
        throw DomainError("populations sum to more than one");
    }
}

Vec to_coords(const PhasePoint& pt) {
    Vec x(2 * pt.dim());
    x << pt.q, pt.p;
    return x;
}

PhasePoint from_coords(const Vec& x) {
    if (x.size() % 2 != 0) {
        throw DimensionError("coordinate vector must have even length");
    }
    const auto m = x.size() / 2;
    return PhasePoint{x.head(m), x.tail(m)};
}

HilbertVector build_state(const PhasePoint& pt, int n_levels) {
    validate(pt, n_levels);
    const int m = pt.dim();
    HilbertVector v{CVec(n_levels)};
    for (int i = 0; i < m; ++i) {
        const double r = std::sqrt(std::max(pt.p[i], 0.0));
        v.amps[i] = std::polar(r, -pt.q[i]);
    }
    v.amps[m] = std::sqrt(std::max(pt.p_last(), 0.0));
    return v;
}

PhasePoint hilbert_to_phase(const HilbertVector& v) {
    const int n = v.size();
    if (n < 2) {
        throw DimensionError("need at least two amplitudes");
    }
    const double norm = v.amps.norm();
    if (std::abs(norm - 1.0) > 1e-10) {
        throw DomainError("state vector is not normalised");
    }
    const std::complex<double> last = v.amps[n - 1];
    if (std::abs(last) <= 1e-12) {
        throw PhaseUndefined("amplitude of the top level vanishes; action-angle chart undefined");
    }
    PhasePoint pt{Vec(n - 1), Vec(n - 1)};
    for (int i = 0; i < n - 1; ++i) {
        pt.p[i] = std::norm(v.amps[i]) / (norm * norm);
        pt.q[i] = pt.p[i] == 0.0 ? 0.0 : -std::arg(v.amps[i] / last);
    }
    return pt;
}

double hamiltonian_value(const PhasePoint& pt, const EnergySpectrum& spec) {
    require_dim(pt, spec);
    return spec.ground() + spec.frequencies().dot(pt.p);
}

Vec hamiltonian_gradient(const EnergySpectrum& spec) {
    const int m = spec.n_levels() - 1;
    Vec g = Vec::Zero(2 * m);
    g.tail(m) = spec.frequencies();
    return g;
}

Vec hamiltonian_gradient(const PhasePoint& pt, const EnergySpectrum& spec) {
    require_dim(pt, spec);
    return hamiltonian_gradient(spec);
}

Mat canonical_omega(int n_levels) {
    if (n_levels < 2) {
        throw DomainError("canonical form needs n >= 2");
    }
    const int m = n_levels - 1;
    Mat om = Mat::Zero(2 * m, 2 * m);
    om.topRightCorner(m, m).setIdentity();
    om.bottomLeftCorner(m, m) = -Mat::Identity(m, m);
    return om;
}

PhasePoint unitary_flow(const PhasePoint& pt0, const EnergySpectrum& spec, double t) {
    require_dim(pt0, spec);
    PhasePoint out = pt0;
    if (t != 0.0) {
        out.q += spec.frequencies() * t;
    }
    return out;
}

double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::remainder(a, two_pi);  // [-pi, pi]
    if (r <= -std::numbers::pi) {
        r += two_pi;
    }
    return r;
}

}  // namespace qcons
