#pragma once

#include <Eigen/Dense>
#include <vector>

#include "drfb/basis.hpp"
#include "drfb/battery.hpp"
#include "drfb/telemetry.hpp"

namespace drfb {

struct ObserverConfig {
    Eigen::Vector2d gain_l = Eigen::Vector2d::Zero(); // [1/s]
    double f_scalar = 0.0;
    Eigen::MatrixXd lambda_inv; // m x m, symmetric positive definite
    double sigma = 0.0;         // leakage
    double dt = 1.0;            // [s]
    std::size_t record_stride = 1;

    void validate() const;
};

struct ObserverState {
    StateVector x_hat;
    Eigen::VectorXd theta_hat;
    double t = 0.0;
};

struct EstimateRecord {
    double t = 0.0;
    StateVector x_hat;
    Eigen::VectorXd theta_hat;
    double y_tilde = 0.0;
    double q_x_hat = 0.0; // basis flux at the record's instant [mol/s]
};

// theta-dot law: lambda_inv (psi f y_tilde - sigma/2 theta |y_tilde|)
Eigen::VectorXd adaptation(const ObserverConfig& cfg,
                           const Eigen::VectorXd& psi_hat, double y_tilde,
                           const Eigen::VectorXd& theta_hat);

// One RK4 step with y, current, and flow held constant.
ObserverState step(const ObserverConfig& cfg, const BatteryParams& p,
                   const ModelMatrices& m, const RbfBasis& basis,
                   const ObserverState& st, double y, double current,
                   double q_flow);

// Drives the observer over a trace already resampled to cfg.dt; measurement
// is the inverted voltage. One record per record_stride instants (first and
// last always included).
std::vector<EstimateRecord> run(const ObserverConfig& cfg,
                                const BatteryParams& p, const ModelMatrices& m,
                                const RbfBasis& basis,
                                const TelemetryTrace& trace,
                                const ObserverState& init);

} // namespace drfb
