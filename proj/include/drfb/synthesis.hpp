#pragma once

#include <Eigen/Dense>
#include <vector>

#include "drfb/battery.hpp"
#include "drfb/sdp.hpp"

namespace drfb {

// Polytopic synthesis program over flow-rate vertices [q_min, q_max].
struct SynthesisConfig {
    double q_min = 0.0;                // [L/s]
    double q_max = 0.0;                // [L/s]
    double beta = 1e-4;                // decay floor added to W
    double kappa_z = 1.0;              // objective weight on ||Z||
    double kappa_f = 1e-5;             // objective weight on |F|
    Eigen::Vector2d omega_floor{1e-6, 1e-6};
    double tol = 1e-8;                 // solver duality-measure stop

    void validate() const;
};

// Certified observer gains. The equality coupling P e = c' f is eliminated
// analytically, so p12 = -p11 e1/e2 and f = p12 e1 + p22 e2 hold by
// construction and the stored residual is rounding-level.
struct GainSolution {
    Eigen::Matrix2d p_mat;
    Eigen::Vector2d z_vec;
    Eigen::Vector2d l_gain;            // P^{-1} Z
    double f_scalar = 0.0;
    Eigen::Matrix2d w_mat;             // diagonal slack
    double alpha_bar = 0.0;
    double gamma_z = 0.0;
    double gamma_f = 0.0;
    std::vector<double> margins;       // audited min eigenvalue per block
    double objective = 0.0;
    SdpStatus status = SdpStatus::stalled;

    double lme_residual(const ModelMatrices& m) const;
};

// Decision vector layout (9 variables after elimination):
//   [p11, p22, z1, z2, w1, w2, alpha_bar, gamma_z, gamma_f]
SdpProblem assemble(const SynthesisConfig& cfg, const ModelMatrices& m);

GainSolution synthesize(const SynthesisConfig& cfg, const ModelMatrices& m,
                        const SdpOptions* opts = nullptr);

struct CertificateReport {
    std::vector<double> q_grid;
    std::vector<double> margins;       // vertex-form block min-eig at each q
    double min_margin = 0.0;
    double lme_residual = 0.0;
    // same check in the congruence-scaled form (sqrt(alpha) P off-diagonal,
    // identity corner, alpha = 1/alpha_bar)
    double scaled_form_min_margin = 0.0;
};

CertificateReport certify(const GainSolution& sol, const SynthesisConfig& cfg,
                          const ModelMatrices& m, int grid_n);

} // namespace drfb
