#include "drfb/jsonio.hpp"

#include <fstream>

#include <json.hpp>

#include "drfb/errors.hpp"

namespace drfb {

namespace {

using nlohmann::json;

json matrix2(const Eigen::Matrix2d& m) {
    return json::array({json::array({m(0, 0), m(0, 1)}),
                        json::array({m(1, 0), m(1, 1)})});
}

Eigen::Matrix2d read_matrix2(const json& j, const char* name) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 ||
        !j[1].is_array() || j[1].size() != 2)
        throw validation_error(std::string("gains: field ") + name +
                               " must be a 2x2 matrix");
    Eigen::Matrix2d m;
    m << j[0][0].get<double>(), j[0][1].get<double>(), j[1][0].get<double>(),
        j[1][1].get<double>();
    return m;
}

Eigen::Vector2d read_vector2(const json& j, const char* name) {
    if (!j.is_array() || j.size() != 2)
        throw validation_error(std::string("gains: field ") + name +
                               " must be a 2-vector");
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

std::string gains_to_json(const GainSolution& sol) {
    json j;
    j["p"] = matrix2(sol.p_mat);
    j["z"] = json::array({sol.z_vec[0], sol.z_vec[1]});
    j["l"] = json::array({sol.l_gain[0], sol.l_gain[1]});
    j["f"] = sol.f_scalar;
    j["w"] = matrix2(sol.w_mat);
    j["alpha_bar"] = sol.alpha_bar;
    j["gamma_z"] = sol.gamma_z;
    j["gamma_f"] = sol.gamma_f;
    j["margins"] = sol.margins;
    return j.dump(2) + "\n";
}

void save_gains(const GainSolution& sol, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("gains: cannot write " + path);
    out << gains_to_json(sol);
    if (!out) throw config_error("gains: write failed for " + path);
}

GainSolution load_gains(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("gains: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw validation_error("gains: cannot parse " + path + ": " + e.what());
    }
    for (const char* field :
         {"p", "z", "l", "f", "w", "alpha_bar", "gamma_z", "gamma_f", "margins"})
        if (!j.contains(field))
            throw validation_error(std::string("gains: missing field ") + field +
                                   " in " + path);
    GainSolution sol;
    sol.p_mat = read_matrix2(j["p"], "p");
    sol.z_vec = read_vector2(j["z"], "z");
    sol.l_gain = read_vector2(j["l"], "l");
    sol.f_scalar = j["f"].get<double>();
    sol.w_mat = read_matrix2(j["w"], "w");
    sol.alpha_bar = j["alpha_bar"].get<double>();
    sol.gamma_z = j["gamma_z"].get<double>();
    sol.gamma_f = j["gamma_f"].get<double>();
    sol.margins = j["margins"].get<std::vector<double>>();
    sol.objective = 0.0;
    sol.status = SdpStatus::optimal;
    return sol;
}

std::string bounds_to_json(const BoundReport& rep) {
    json j;
    j["gamma_psi"] = rep.gamma_psi;
    j["gamma_psi_tilde"] = rep.gamma_psi_tilde;
    j["gamma_e"] = rep.gamma_e;
    j["gamma_c"] = rep.gamma_c;
    j["gamma_f"] = rep.gamma_f;
    j["gamma_w"] = rep.gamma_w;
    j["gamma"] = rep.gamma;
    j["gamma_max_admissible"] = rep.gamma_max_admissible;
    j["gamma_compatible"] = rep.gamma_compatible;
    j["delta_bar"] = rep.delta_bar;
    auto opt = [](const std::optional<double>& v) {
        return v ? json(*v) : json(nullptr);
    };
    j["gamma1"] = opt(rep.gamma1);
    j["gamma2"] = opt(rep.gamma2);
    j["r_x_tilde"] = opt(rep.r_x_tilde);
    j["r_theta_tilde"] = opt(rep.r_theta_tilde);
    return j.dump(2) + "\n";
}

void save_bounds(const BoundReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("bounds: cannot write " + path);
    out << bounds_to_json(rep);
    if (!out) throw config_error("bounds: write failed for " + path);
}

} // namespace drfb
