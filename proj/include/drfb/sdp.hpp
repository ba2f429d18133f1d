#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace drfb {

// One PSD constraint: constant + sum_i x_i coeff[i] >= 0. All matrices
// symmetric, sizes small (<= 8x8 in practice).
struct SdpBlock {
    Eigen::MatrixXd constant;
    std::vector<Eigen::MatrixXd> coeff;   // one per decision variable
};

struct SdpProblem {
    int n_vars = 0;
    Eigen::VectorXd objective;
    std::vector<SdpBlock> blocks;

    void validate() const;
    // total barrier order (sum of block dimensions), the nu in the
    // duality-measure stop nu/t <= tol
    int barrier_order() const;
};

enum class SdpStatus { optimal, infeasible, stalled };

inline const char* to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::optimal: return "optimal";
        case SdpStatus::infeasible: return "infeasible";
        default: return "stalled";
    }
}

struct SdpSolution {
    Eigen::VectorXd x;
    double objective_value = 0.0;
    std::vector<double> block_min_eig;
    int iterations = 0;               // total Newton steps, both phases
    SdpStatus status = SdpStatus::stalled;
    double phase1_margin = 0.0;       // final phase-1 s (negative = strictly feasible)
};

struct SdpOptions {
    double tol = 1e-8;                // duality-measure stop
    int max_outer = 200;              // centering rounds per phase
    double t0 = 1.0;
    double mu = 10.0;
    double newton_tol = 1e-10;        // half squared Newton decrement
    int newton_iters = 100;           // per centering round
    double feas_margin = 1e-6;        // phase 1 accepts s < -feas_margin
    double phase1_t_cap = 1e14;
    std::string trace_csv;            // dump iterates when nonempty
};

// Log-det barrier interior-point over the block constraints. Phase 1
// minimizes s with blocks shifted by s*I; phase 2 follows the central
// path t <- mu*t until barrier_order()/t <= tol.
SdpSolution solve(const SdpProblem& p, const SdpOptions& opt = {});

// Exposed for direct use: returns true and writes a strictly feasible
// point, or returns false (infeasibility certificate by failure).
bool phase1(const SdpProblem& p, Eigen::VectorXd& x_out, const SdpOptions& opt = {},
            int* newton_steps = nullptr, double* final_margin = nullptr);

// Smallest eigenvalue by cyclic Jacobi rotations, run until the
// off-diagonal Frobenius norm falls below 1e-12 (relative to the matrix
// scale). Independent of the solver path, used for feasibility audits.
double min_eig(const Eigen::MatrixXd& sym);

} // namespace drfb
