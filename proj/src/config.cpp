#include "drfb/config.hpp"

#include <fstream>
#include <sstream>

#include "drfb/errors.hpp"

namespace drfb {

namespace {

constexpr double kMlMinPerLs = 60000.0;
constexpr double kSecPerMin = 60.0;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw config_error("config: cannot parse value for " + key);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw config_error("config: cannot parse value for " + key);
    }
}

} // namespace

RbfBasis RunConfig::make_basis() const {
    return RbfBasis::uniform(basis_m, basis_center_lo, basis_center_hi,
                             basis_variance, basis_convention);
}

Eigen::MatrixXd RunConfig::make_lambda_inv() const {
    if (lambda_inv_file.empty()) {
        if (!(lambda_inv_scalar > 0.0))
            throw config_error("config: observer.lambda_inv must be positive");
        return lambda_inv_scalar *
               Eigen::MatrixXd::Identity(basis_m, basis_m);
    }
    std::ifstream in(lambda_inv_file);
    if (!in)
        throw config_error("config: cannot open observer.lambda_inv_file " +
                           lambda_inv_file);
    Eigen::MatrixXd m(basis_m, basis_m);
    for (int i = 0; i < basis_m; ++i)
        for (int j = 0; j < basis_m; ++j)
            if (!(in >> m(i, j)))
                throw config_error(
                    "config: observer.lambda_inv_file must hold an m x m matrix");
    return m;
}

BoundAssumptions RunConfig::make_assumptions(const RbfBasis& b) const {
    BoundAssumptions a;
    if (bounds_gamma_theta && bounds_eps_bar) {
        a.gamma_theta = *bounds_gamma_theta;
        a.eps_bar = *bounds_eps_bar;
    } else {
        a = default_assumptions(battery, k_mt, b);
        if (bounds_gamma_theta) a.gamma_theta = *bounds_gamma_theta;
        if (bounds_eps_bar) a.eps_bar = *bounds_eps_bar;
    }
    a.w_bar = bounds_w_bar;
    a.gamma_s_tilde = bounds_gamma_s_tilde;
    a.rho = bounds_rho;
    a.varrho = bounds_varrho;
    a.validate();
    return a;
}

void RunConfig::validate() const {
    battery.validate();
    if (basis_m < 1) throw config_error("config: basis.m must be >= 1");
    if (!(q_flow > 0.0)) throw config_error("config: flow.q_ml_min must be positive");
    if (k_mt < 0.0) throw config_error("config: crossover.k_mt_l_min must be >= 0");
    synthesis.validate();
    if (sigma < 0.0) throw config_error("config: observer.sigma must be >= 0");
    if (!(observer_dt > 0.0)) throw config_error("config: observer.dt_s must be positive");
    if (!(sim_dt > 0.0) || !(sim_t_end > 0.0))
        throw config_error("config: sim.dt_s and sim.t_end_s must be positive");
    if (!(trace_dt > 0.0) || !(trace_t_end > 0.0))
        throw config_error("config: trace.dt_s and trace.t_end_s must be positive");
    if (trace_noise_w < 0.0)
        throw config_error("config: trace.noise_w_v must be >= 0");
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig c;
    bool have_m = false;

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "config: " << origin << " line " << line_no
               << ": expected key = value";
            throw config_error(os.str());
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) {
            std::ostringstream os;
            os << "config: " << origin << " line " << line_no
               << ": empty key or value";
            throw config_error(os.str());
        }

        if (key == "battery.v_res_ml") c.battery.v_res = parse_double(key, val) * 1e-3;
        else if (key == "battery.v_cell_ml") c.battery.v_cell = parse_double(key, val) * 1e-3;
        else if (key == "battery.c0_mol_l") c.battery.c0 = parse_double(key, val);
        else if (key == "battery.epsilon") c.battery.epsilon = parse_double(key, val);
        else if (key == "battery.e0_cell_v") c.battery.e0_cell = parse_double(key, val);
        else if (key == "battery.temperature_k") c.battery.temperature = parse_double(key, val);
        else if (key == "flow.q_ml_min") c.q_flow = parse_double(key, val) / kMlMinPerLs;
        else if (key == "crossover.k_mt_l_min") c.k_mt = parse_double(key, val) / kSecPerMin;
        else if (key == "basis.m") {
            c.basis_m = static_cast<int>(parse_double(key, val));
            have_m = true;
        } else if (key == "basis.center_lo") c.basis_center_lo = parse_double(key, val);
        else if (key == "basis.center_hi") c.basis_center_hi = parse_double(key, val);
        else if (key == "basis.variance") c.basis_variance = parse_double(key, val);
        else if (key == "basis.variance_convention") {
            if (val == "half") c.basis_convention = VarianceConvention::half;
            else if (val == "plain") c.basis_convention = VarianceConvention::plain;
            else throw config_error("config: basis.variance_convention must be half or plain");
        }
        else if (key == "synthesis.q_min_ml_min") c.synthesis.q_min = parse_double(key, val) / kMlMinPerLs;
        else if (key == "synthesis.q_max_ml_min") c.synthesis.q_max = parse_double(key, val) / kMlMinPerLs;
        else if (key == "synthesis.beta") c.synthesis.beta = parse_double(key, val);
        else if (key == "synthesis.kappa_z") c.synthesis.kappa_z = parse_double(key, val);
        else if (key == "synthesis.kappa_f") c.synthesis.kappa_f = parse_double(key, val);
        else if (key == "synthesis.omega_floor_1") c.synthesis.omega_floor[0] = parse_double(key, val);
        else if (key == "synthesis.omega_floor_2") c.synthesis.omega_floor[1] = parse_double(key, val);
        else if (key == "synthesis.tol") c.synthesis.tol = parse_double(key, val);
        else if (key == "observer.lambda_inv") c.lambda_inv_scalar = parse_double(key, val);
        else if (key == "observer.lambda_inv_file") c.lambda_inv_file = val;
        else if (key == "observer.sigma") c.sigma = parse_double(key, val);
        else if (key == "observer.dt_s") c.observer_dt = parse_double(key, val);
        else if (key == "observer.x0_soc") c.observer_x0.soc = parse_double(key, val);
        else if (key == "observer.x0_soc_cell") c.observer_x0.soc_cell = parse_double(key, val);
        else if (key == "observer.theta0_fill") c.observer_theta0_fill = parse_double(key, val);
        else if (key == "observer.record_stride") c.record_stride = static_cast<std::size_t>(parse_u64(key, val));
        else if (key == "sim.dt_s") c.sim_dt = parse_double(key, val);
        else if (key == "sim.t_end_s") c.sim_t_end = parse_double(key, val);
        else if (key == "sim.current_a") c.sim_current = parse_double(key, val);
        else if (key == "sim.record_stride") c.sim_record_stride = static_cast<std::size_t>(parse_u64(key, val));
        else if (key == "sim.x0_soc") c.sim_x0.soc = parse_double(key, val);
        else if (key == "sim.x0_soc_cell") c.sim_x0.soc_cell = parse_double(key, val);
        else if (key == "trace.dt_s") c.trace_dt = parse_double(key, val);
        else if (key == "trace.t_end_s") c.trace_t_end = parse_double(key, val);
        else if (key == "trace.noise_w_v") c.trace_noise_w = parse_double(key, val);
        else if (key == "trace.seed") c.trace_seed = parse_u64(key, val);
        else if (key == "trace.x0_soc") c.trace_x0.soc = parse_double(key, val);
        else if (key == "trace.x0_soc_cell") c.trace_x0.soc_cell = parse_double(key, val);
        else if (key == "bounds.gamma_theta") c.bounds_gamma_theta = parse_double(key, val);
        else if (key == "bounds.eps_bar") c.bounds_eps_bar = parse_double(key, val);
        else if (key == "bounds.w_bar") c.bounds_w_bar = parse_double(key, val);
        else if (key == "bounds.gamma_s_tilde") c.bounds_gamma_s_tilde = parse_double(key, val);
        else if (key == "bounds.rho") c.bounds_rho = parse_double(key, val);
        else if (key == "bounds.varrho") c.bounds_varrho = parse_double(key, val);
        else {
            std::ostringstream os;
            os << "config: " << origin << " line " << line_no << ": unknown key '"
               << key << "'";
            throw config_error(os.str());
        }
    }

    if (!have_m)
        throw config_error("config: missing required key 'basis.m' in " + origin);
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

} // namespace drfb
