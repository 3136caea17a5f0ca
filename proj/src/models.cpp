#include "qcons/models.hpp"

#include "qcons/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace qcons {

namespace {

using cd = std::complex<double>;

constexpr std::array<std::string_view, 4> kModelNames = {
    "two-spin-product", "three-spin-product", "two-spin-disentangled", "unconstrained"};

void require_levels(const PhasePoint& pt, int n, const char* what) {
    if (pt.q.size() != pt.p.size() || pt.n_levels() != n) {
        throw DimensionError(std::string(what) + " needs a " + std::to_string(n) + "-level point");
    }
}

void require_levels(const EnergySpectrum& spec, int n, const char* what) {
    if (spec.n_levels() != n) {
        throw DimensionError(std::string(what) + " needs a " + std::to_string(n) + "-level spectrum");
    }
}

double frequency_scale(const Vec& w) { return std::max(1.0, w.cwiseAbs().maxCoeff()); }

// Gradient over the p-block of p_a p_b, where index 7 (0-based) stands for
// the dependent population p8 = 1 - sum p_i.
void add_product_gradient(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row, const Vec& p, double p_last, int a,
                          int b, double sign) {
    const int m = static_cast<int>(p.size());
    auto value = [&](int i) { return i == m ? p_last : p[i]; };
    auto accumulate = [&](int i, double coeff) {
        if (i == m) {
            row.tail(m).array() -= sign * coeff;
        } else {
            row[m + i] += sign * coeff;
        }
    };
    accumulate(a, value(b));
    accumulate(b, value(a));
}

}  // namespace

std::string_view model_name(ModelId id) { return kModelNames[static_cast<int>(id)]; }

std::optional<ModelId> parse_model(std::string_view name) {
    for (std::size_t i = 0; i < kModelNames.size(); ++i) {
        if (kModelNames[i] == name) {
            return static_cast<ModelId>(i);
        }
    }
    return std::nullopt;
}

std::optional<int> model_levels(ModelId id) {
    switch (id) {
        case ModelId::TwoSpinProduct:
        case ModelId::TwoSpinDisentangled:
            return 4;
        case ModelId::ThreeSpinProduct:
            return 8;
        case ModelId::Unconstrained:
            return std::nullopt;
    }
    return std::nullopt;
}

ConstraintSet model_constraints(ModelId id, int n_levels, double singularity_floor) {
    if (auto n = model_levels(id); n && *n != n_levels) {
        throw DimensionError(std::string(model_name(id)) + " requires n = " + std::to_string(*n));
    }
    switch (id) {
        case ModelId::TwoSpinProduct:
            return two_spin_product_constraints();
        case ModelId::ThreeSpinProduct:
            return three_spin_product_constraints();
        case ModelId::TwoSpinDisentangled:
            return disentangled_constraints(singularity_floor);
        case ModelId::Unconstrained:
            return ConstraintSet::empty(n_levels);
    }
    throw DomainError("unknown model");
}

ConstraintSet two_spin_product_constraints() {
    auto values = [](const Vec& x) {
        const double p1 = x[3], p2 = x[4], p3 = x[5];
        const double p4 = 1.0 - p1 - p2 - p3;
        Vec phi(2);
        phi << wrap_angle(x[0] - x[1] - x[2]), p1 * p4 - p2 * p3;
        return phi;
    };
    auto gradients = [](const Vec& x) {
        const double p1 = x[3], p2 = x[4], p3 = x[5];
        const double p4 = 1.0 - p1 - p2 - p3;
        Mat g = Mat::Zero(2, 6);
        g.row(0) << 1, -1, -1, 0, 0, 0;
        g.row(1) << 0, 0, 0, p4 - p1, -p1 - p3, -p1 - p2;
        return g;
    };
    return ConstraintSet(4, values, gradients, {"q1-q2-q3", "p1p4-p2p3"}, {true, false});
}

Eigen::Vector2d raw_quadric_residual(const PhasePoint& pt) {
    require_levels(pt, 4, "raw_quadric_residual");
    const double p4 = std::max(pt.p_last(), 0.0);
    const double a = std::sqrt(std::max(pt.p[0], 0.0) * p4);
    const double b = std::sqrt(std::max(pt.p[1] * pt.p[2], 0.0));
    const double s = pt.q[1] + pt.q[2];
    return {a * std::cos(pt.q[0]) - b * std::cos(s), a * std::sin(pt.q[0]) - b * std::sin(s)};
}

Vec closed_form_velocity_ex1(const PhasePoint& pt, const EnergySpectrum& spec) {
    require_levels(pt, 4, "closed_form_velocity_ex1");
    require_levels(spec, 4, "closed_form_velocity_ex1");
    const Vec w = spec.frequencies();
    const double c = w[0] - w[1] - w[2];
    const double p1 = pt.p[0], p2 = pt.p[1], p3 = pt.p[2];
    Vec v = Vec::Zero(6);
    v[0] = c * (2.0 * p1 + p2 + p3) + (w[1] + w[2]);
    v[1] = c * (p1 + p3) + w[1];
    v[2] = c * (p1 + p2) + w[2];
    return v;
}

Mat closed_form_lambda_block_ex1(const PhasePoint& pt) {
    require_levels(pt, 4, "closed_form_lambda_block_ex1");
    const double p1 = pt.p[0], p2 = pt.p[1], p3 = pt.p[2];
    const double p4 = pt.p_last();
    Mat a(3, 3);
    a << p1 - p4, p4 - p1, p4 - p1,
         p1 + p3, -p1 - p3, -p1 - p3,
         p1 + p2, -p1 - p2, -p1 - p2;
    return a;
}

ConstraintSet three_spin_product_constraints() {
    // Angle relations as (plus, minus) index lists, 0-based.
    struct AngleRel {
        std::vector<int> plus, minus;
    };
    static const std::array<AngleRel, 4> angles = {{
        {{1}, {4, 5}},        // q2 - q5 - q6
        {{0, 6}, {2, 3}},     // q1 + q7 - q3 - q4
        {{0}, {1, 6}},        // q1 - q2 - q7
        {{2, 5}, {3, 4}},     // q3 + q6 - q4 - q5
    }};
    // Population relations p_a p_b - p_c p_d; index 7 is p8.
    static const std::array<std::array<int, 4>, 4> pops = {{
        {1, 7, 4, 5},  // p2 p8 - p5 p6
        {0, 6, 2, 3},  // p1 p7 - p3 p4
        {0, 7, 1, 6},  // p1 p8 - p2 p7
        {2, 5, 3, 4},  // p3 p6 - p4 p5
    }};
    auto values = [](const Vec& x) {
        const Vec q = x.head(7);
        const Vec p = x.tail(7);
        const double p8 = 1.0 - p.sum();
        auto pv = [&](int i) { return i == 7 ? p8 : p[i]; };
        Vec phi(8);
        for (int k = 0; k < 4; ++k) {
            double s = 0.0;
            for (int i : angles[k].plus) s += q[i];
            for (int i : angles[k].minus) s -= q[i];
            phi[k] = wrap_angle(s);
            const auto& r = pops[k];
            phi[4 + k] = pv(r[0]) * pv(r[1]) - pv(r[2]) * pv(r[3]);
        }
        return phi;
    };
    auto gradients = [](const Vec& x) {
        const Vec p = x.tail(7);
        const double p8 = 1.0 - p.sum();
        Mat g = Mat::Zero(8, 14);
        for (int k = 0; k < 4; ++k) {
            for (int i : angles[k].plus) g(k, i) += 1.0;
            for (int i : angles[k].minus) g(k, i) -= 1.0;
            const auto& r = pops[k];
            add_product_gradient(g.row(4 + k), p, p8, r[0], r[1], 1.0);
            add_product_gradient(g.row(4 + k), p, p8, r[2], r[3], -1.0);
        }
        return g;
    };
    return ConstraintSet(8, values, gradients,
                         {"q2-q5-q6", "q1+q7-q3-q4", "q1-q2-q7", "q3+q6-q4-q5", "p2p8-p5p6",
                          "p1p7-p3p4", "p1p8-p2p7", "p3p6-p4p5"},
                         {true, true, true, true, false, false, false, false});
}

HilbertVector three_spin_product(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b,
                                 const Eigen::Vector2cd& c) {
    // Spin patterns (s1 s2 s3) for levels 1..8.
    static constexpr std::array<std::array<int, 3>, 8> patterns = {{
        {0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}, {1, 1, 1}}};
    HilbertVector v{CVec(8)};
    for (int i = 0; i < 8; ++i) {
        const auto& s = patterns[i];
        v.amps[i] = a[s[0]] * b[s[1]] * c[s[2]];
    }
    return v;
}

ConstraintSet disentangled_constraints(double floor) {
    auto sqrt_p1p4 = [floor](const Vec& x) {
        const double p1 = x[3];
        const double p4 = 1.0 - x[3] - x[4] - x[5];
        const double prod = p1 * p4;
        if (!(prod >= floor)) {
            throw ChartSingularity("p1 p4 below the singularity floor in the disentangled chart");
        }
        return std::sqrt(prod);
    };
    auto values = [sqrt_p1p4](const Vec& x) {
        const double s = sqrt_p1p4(x);
        const double a = 2.0 * x[1] - x[0];
        const double b = 2.0 * x[2] - x[0];
        const double p2 = x[4], p3 = x[5];
        Vec phi(2);
        phi << 2.0 * s - p2 * std::cos(a) + p3 * std::cos(b), p2 * std::sin(a) - p3 * std::sin(b);
        return phi;
    };
    auto gradients = [sqrt_p1p4](const Vec& x) {
        const double s = sqrt_p1p4(x);
        const double a = 2.0 * x[1] - x[0];
        const double b = 2.0 * x[2] - x[0];
        const double p1 = x[3], p2 = x[4], p3 = x[5];
        const double p4 = 1.0 - p1 - p2 - p3;
        const double sa = std::sin(a), ca = std::cos(a), sb = std::sin(b), cb = std::cos(b);
        Mat g(2, 6);
        g.row(0) << -p2 * sa + p3 * sb, 2.0 * p2 * sa, -2.0 * p3 * sb, (p4 - p1) / s, -p1 / s - ca,
            -p1 / s + cb;
        g.row(1) << -p2 * ca + p3 * cb, 2.0 * p2 * ca, -2.0 * p3 * cb, 0.0, sa, -sb;
        return g;
    };
    return ConstraintSet(4, values, gradients, {"Re(psi1psi4-psi2psi3)", "Im(psi1psi4-psi2psi3)"},
                         {false, false});
}

Vec closed_form_velocity_ex3(const PhasePoint& pt, const EnergySpectrum& spec) {
    require_levels(pt, 4, "closed_form_velocity_ex3");
    require_levels(spec, 4, "closed_form_velocity_ex3");
    const double q1 = pt.q[0], q2 = pt.q[1], q3 = pt.q[2];
    const double p1 = pt.p[0], p2 = pt.p[1], p3 = pt.p[2];
    const double p4 = 1.0 - p1 - p2 - p3;
    if (!(p1 * p4 > 1e-12)) {
        throw ChartSingularity("closed form undefined for p1 p4 <= 1e-12");
    }
    const Vec w = spec.frequencies();
    const double w1 = w[0], w2 = w[1], w3 = w[2];
    const double s = std::sqrt(p1 * p4);
    const double sin_d = std::sin(2.0 * (q2 - q3));
    const double cos_d = std::cos(2.0 * (q2 - q3));
    const double c3 = std::cos(2.0 * q3 - q1);

    Vec v(6);
    v[0] = 2.0 * p3 * (1.0 - 2.0 * p1 - p2 - p3) * (w2 - w3) * c3 / s +
           (w1 - 2.0 * w2) * (2.0 * p1 + p2 + p3) + 2.0 * w2;
    v[1] = 2.0 * p1 * p3 * (w3 - w2) * c3 / s + (w1 - 2.0 * w2) * (2.0 * p1 + p2) -
           p3 * (w1 - 2.0 * w3) + 2.0 * w2;
    v[2] = 2.0 * p1 * p3 * (w3 - w2) * c3 / s + (w1 - 2.0 * w2) * (2.0 * p1 - p2 * cos_d) +
           p3 * (w1 - 2.0 * w3) + 2.0 * w3;
    v[3] = 2.0 * p2 * p3 * (w1 - w3) * sin_d;
    v[4] = -2.0 * p2 * p3 * (w1 - 2.0 * w3) * sin_d;
    v[5] = 2.0 * p2 * p3 * (w1 - 2.0 * w2) * sin_d;
    return v;
}

HilbertVector ex3_basis_map(const PhasePoint& pt) {
    require_levels(pt, 4, "ex3_basis_map");
    const HilbertVector e = build_state(pt, 4);
    const double r = std::numbers::sqrt2 / 2.0;
    HilbertVector v{CVec(4)};
    v.amps[0] = e.amps[3];
    v.amps[1] = r * (e.amps[1] - e.amps[2]);
    v.amps[2] = r * (e.amps[1] + e.amps[2]);
    v.amps[3] = e.amps[0];
    return v;
}

PhasePoint ex3_basis_unmap(const HilbertVector& product_amps) {
    if (product_amps.size() != 4) {
        throw DimensionError("ex3_basis_unmap needs four product-basis amplitudes");
    }
    const double r = std::numbers::sqrt2 / 2.0;
    const CVec& a = product_amps.amps;
    HilbertVector e{CVec(4)};
    e.amps[0] = a[3];
    e.amps[1] = r * (a[1] + a[2]);
    e.amps[2] = r * (a[2] - a[1]);
    e.amps[3] = a[0];
    return hilbert_to_phase(e);
}

double segre_membership(const HilbertVector& v, ModelId model) {
    const CVec& psi = v.amps;
    switch (model) {
        case ModelId::TwoSpinProduct:
        case ModelId::TwoSpinDisentangled:
            if (psi.size() != 4) {
                throw DimensionError("two-spin membership needs four amplitudes");
            }
            return std::abs(psi[0] * psi[3] - psi[1] * psi[2]);
        case ModelId::ThreeSpinProduct: {
            if (psi.size() != 8) {
                throw DimensionError("three-spin membership needs eight amplitudes");
            }
            auto rel = [&](int a, int b, int c, int d) {
                return std::abs(psi[a - 1] * psi[b - 1] - psi[c - 1] * psi[d - 1]);
            };
            return std::max({rel(1, 7, 3, 4), rel(2, 8, 5, 6), rel(1, 8, 2, 7), rel(3, 6, 4, 5)});
        }
        case ModelId::Unconstrained:
            return 0.0;
    }
    return 0.0;
}

bool spectrum_condition(const EnergySpectrum& spec, ModelId model) {
    const Vec w = spec.frequencies();
    const double tol = 1e-12 * frequency_scale(w);
    switch (model) {
        case ModelId::TwoSpinProduct:
        case ModelId::TwoSpinDisentangled:
            require_levels(spec, 4, "spectrum_condition");
            return std::abs(w[0] - w[1] - w[2]) <= tol;
        case ModelId::ThreeSpinProduct:
            require_levels(spec, 8, "spectrum_condition");
            return std::abs(w[0] - w[1] - w[6]) <= tol && std::abs(w[1] - w[4] - w[5]) <= tol &&
                   std::abs(w[0] + w[6] - w[2] - w[3]) <= tol &&
                   std::abs(w[2] + w[5] - w[3] - w[4]) <= tol;
        case ModelId::Unconstrained:
            return true;
    }
    return false;
}

Eigen::Matrix4d heisenberg_matrix(const HeisenbergParams& hp) {
    Eigen::Matrix4d ss;  // sigma1 . sigma2
    ss << 1, 0, 0, 0,
          0, -1, 2, 0,
          0, 2, -1, 0,
          0, 0, 0, 1;
    const Eigen::Vector4d sz(2.0, 0.0, 0.0, -2.0);
    Eigen::Matrix4d h = -hp.J * ss;
    h.diagonal() -= hp.B * sz;
    return h;
}

EnergySpectrum heisenberg_spectrum(const HeisenbergParams& hp) {
    return EnergySpectrum::from_levels(
        {-hp.J + 2.0 * hp.B, -hp.J, 3.0 * hp.J, -hp.J - 2.0 * hp.B});
}

}  // namespace qcons
