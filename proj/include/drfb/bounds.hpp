#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "drfb/basis.hpp"
#include "drfb/battery.hpp"
#include "drfb/synthesis.hpp"

namespace drfb {

// sup-norm constants of the basis used by the error analysis
struct BasisBounds {
    double gamma_psi = 1.0;       // sup over s of ||psi(s)||
    double gamma_psi_tilde = 0.0; // Lipschitz constant of s -> psi(s)
};

BasisBounds basis_bounds(const RbfBasis& b);

struct BoundAssumptions {
    double gamma_theta = 0.0;  // parameter-norm bound [mol/s scale]
    double w_bar = 1e-3;       // output-error bound
    double eps_bar = 0.0;      // approximation-error bound [mol/s]
    double gamma_s_tilde = 1.0; // state-to-s sensitivity
    double rho = 0.5;          // uncertainty split factor
    double varrho = 0.5;       // decay split factor

    void validate() const;
};

// gamma_theta and eps_bar calibrated against the linear crossover law the
// basis is meant to reproduce; everything else at its documented default
BoundAssumptions default_assumptions(const BatteryParams& p, double k_mt,
                                     const RbfBasis& b);

double disturbance_bound(const BoundAssumptions& a, const GainSolution& sol,
                         const ModelMatrices& m, const BasisBounds& bb);

struct CouplingGamma {
    double gamma = 0.0;
    double max_admissible = 0.0; // sqrt(beta / alpha_bar)
    bool compatible = false;     // gamma^2 <= alpha * beta
};

CouplingGamma coupling_gamma(const BoundAssumptions& a, const ModelMatrices& m,
                             const BasisBounds& bb, const GainSolution& sol,
                             double beta);

struct UubRadii {
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double r_x_tilde = 0.0;
    double r_theta_tilde = 0.0;
};

UubRadii uub_radii(const BoundAssumptions& a, const GainSolution& sol,
                   const BasisBounds& bb, double delta_bar, double sigma);

struct BoundReport {
    double gamma_psi = 0.0;
    double gamma_psi_tilde = 0.0;
    double gamma_e = 0.0;
    double gamma_c = 0.0;
    double gamma_f = 0.0;
    double gamma_w = 0.0;
    double gamma = 0.0;
    double gamma_max_admissible = 0.0;
    bool gamma_compatible = false;
    double delta_bar = 0.0;
    // absent when sigma = 0 (the radii are undefined without leakage)
    std::optional<double> gamma1, gamma2, r_x_tilde, r_theta_tilde;
};

BoundReport make_bound_report(const BoundAssumptions& a, const GainSolution& sol,
                              const ModelMatrices& m, const RbfBasis& b,
                              double beta, double sigma);

// Gram integral of the basis along an s trajectory, rectangle rule; its
// eigenvalue spread is the persistence-of-excitation diagnostic
Eigen::MatrixXd excitation_gram(const RbfBasis& b,
                                const std::vector<double>& s_path, double dt);

} // namespace drfb
