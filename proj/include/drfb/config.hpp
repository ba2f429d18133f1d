#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "drfb/basis.hpp"
#include "drfb/battery.hpp"
#include "drfb/bounds.hpp"
#include "drfb/synthesis.hpp"

namespace drfb {

// Flat `key = value` config with dotted prefixes and # comments. Unknown
// keys are errors; only basis.m has no default.
struct RunConfig {
    BatteryParams battery;
    double q_flow = 9.0 / 60000.0; // [L/s]
    double k_mt = 5.6142e-8 / 60.0; // [L/s]

    int basis_m = 0;
    double basis_center_lo = 0.05;
    double basis_center_hi = 0.95;
    double basis_variance = 0.0081;
    VarianceConvention basis_convention = VarianceConvention::half;

    // flows stored in [L/s]; defaults bracket the nominal flow by 10%
    SynthesisConfig synthesis{8.1 / 60000.0, 9.9 / 60000.0};

    double lambda_inv_scalar = 4.798e-7;
    std::string lambda_inv_file; // optional m x m matrix override
    double sigma = 0.1;
    double observer_dt = 1.0;
    StateVector observer_x0{0.85, 0.8};
    double observer_theta0_fill = 0.0;
    std::size_t record_stride = 1;

    double sim_dt = 1.0;
    double sim_t_end = 3600.0;
    double sim_current = 0.0; // [A]
    StateVector sim_x0{0.95, 0.95};
    std::size_t sim_record_stride = 1;

    double trace_dt = 60.0;
    double trace_t_end = 86400.0;
    double trace_noise_w = 0.0;
    std::uint64_t trace_seed = 1;
    StateVector trace_x0{0.95, 0.95};

    std::optional<double> bounds_gamma_theta; // absent -> calibrated default
    std::optional<double> bounds_eps_bar;
    double bounds_w_bar = 1e-3;
    double bounds_gamma_s_tilde = 1.0;
    double bounds_rho = 0.5;
    double bounds_varrho = 0.5;

    RbfBasis make_basis() const;
    Eigen::MatrixXd make_lambda_inv() const; // scalar*I or the file content
    BoundAssumptions make_assumptions(const RbfBasis& b) const;

    void validate() const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

} // namespace drfb
