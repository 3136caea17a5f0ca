#include "qcons/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace qcons {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string trajectory_csv_header(int n_levels, int n_constraints) {
    std::string h = "t";
    for (int i = 1; i < n_levels; ++i) h += ",q" + std::to_string(i);
    for (int i = 1; i < n_levels; ++i) h += ",p" + std::to_string(i);
    h += ",H";
    for (int a = 1; a <= n_constraints; ++a) h += ",phi_" + std::to_string(a);
    return h;
}

namespace {

void write_comment_block(std::ostream& os, const nlohmann::json& config) {
    os << "# config: " << config.dump() << '\n';
}

nlohmann::json vec_json(const Vec& v) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : v) a.push_back(x);
    return a;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const nlohmann::json& config) {
    write_comment_block(os, config);
    os << "# status: " << status_name(traj.status);
    if (!traj.message.empty()) os << " (" << traj.message << ")";
    os << '\n';
    if (traj.size() == 0) return;
    const int n = traj.points.front().n_levels();
    const int n_phi = static_cast<int>(traj.constraint_values.front().size());
    os << trajectory_csv_header(n, n_phi) << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const PhasePoint& pt = traj.points[k];
        os << format_double(traj.times[k]);
        for (double q : pt.q) os << ',' << format_double(q);
        for (double p : pt.p) os << ',' << format_double(p);
        os << ',' << format_double(traj.energies[k]);
        for (double f : traj.constraint_values[k]) os << ',' << format_double(f);
        os << '\n';
    }
}

nlohmann::json trajectory_to_json(const Trajectory& traj, const nlohmann::json& config) {
    nlohmann::json j;
    j["config"] = config;
    j["status"] = std::string(status_name(traj.status));
    j["message"] = traj.message;
    j["projections"] = traj.projections;
    j["t"] = traj.times;
    j["H"] = traj.energies;
    j["residual"] = traj.residuals;
    auto& q = j["q"] = nlohmann::json::array();
    auto& p = j["p"] = nlohmann::json::array();
    auto& phi = j["phi"] = nlohmann::json::array();
    auto& lam = j["multipliers"] = nlohmann::json::array();
    for (std::size_t k = 0; k < traj.size(); ++k) {
        q.push_back(vec_json(traj.points[k].q));
        p.push_back(vec_json(traj.points[k].p));
        phi.push_back(vec_json(traj.constraint_values[k]));
        lam.push_back(vec_json(traj.multipliers[k]));
    }
    return j;
}

void write_field_csv(std::ostream& os, const FieldGrid& grid, const nlohmann::json& config) {
    write_comment_block(os, config);
    os << "theta1,phi1,theta1_dot,phi1_dot,flag\n";
    for (const FieldSample& s : grid.samples) {
        os << format_double(s.theta1) << ',' << format_double(s.phi1) << ','
           << format_double(s.theta1_dot) << ','
           << (s.phi1_dot ? format_double(*s.phi1_dot) : std::string("nan")) << ','
           << static_cast<int>(s.flag) << '\n';
    }
}

nlohmann::json field_to_json(const FieldGrid& grid, const nlohmann::json& config) {
    nlohmann::json j;
    j["config"] = config;
    j["model"] = std::string(model_name(grid.model));
    j["n_theta"] = grid.n_theta;
    j["n_phi"] = grid.n_phi;
    j["fixed"]["theta2"] = grid.fixed.theta2;
    if (grid.fixed.phi2) j["fixed"]["phi2"] = *grid.fixed.phi2;
    auto& rows = j["samples"] = nlohmann::json::array();
    for (const FieldSample& s : grid.samples) {
        nlohmann::json r = {{"theta1", s.theta1},
                            {"phi1", s.phi1},
                            {"theta1_dot", s.theta1_dot},
                            {"flag", static_cast<int>(s.flag)}};
        r["phi1_dot"] = s.phi1_dot ? nlohmann::json(*s.phi1_dot) : nlohmann::json(nullptr);
        rows.push_back(std::move(r));
    }
    return j;
}

}  // namespace qcons
