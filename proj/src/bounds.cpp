#include "drfb/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "drfb/errors.hpp"
#include "drfb/sdp.hpp"

namespace drfb {

BasisBounds basis_bounds(const RbfBasis& b) {
    BasisBounds bb;
    // entries are nonnegative and sum to one, so the 2-norm is at most 1
    bb.gamma_psi = 1.0;
    bb.gamma_psi_tilde = lipschitz_bound(b);
    return bb;
}

void BoundAssumptions::validate() const {
    if (gamma_theta < 0.0 || w_bar < 0.0 || eps_bar < 0.0 || gamma_s_tilde < 0.0)
        throw validation_error("bounds: assumption constants must be nonnegative");
    if (rho < 0.0 || rho > 1.0 || varrho < 0.0 || varrho > 1.0)
        throw validation_error("bounds: split factors must lie in [0, 1]");
}

BoundAssumptions default_assumptions(const BatteryParams& p, double k_mt,
                                     const RbfBasis& b) {
    p.validate();
    b.validate();
    if (k_mt < 0.0) throw validation_error("bounds: k_mt must be nonnegative");

    const int n_pts = 200;
    Eigen::VectorXd xs(n_pts), ys(n_pts);
    for (int i = 0; i < n_pts; ++i) {
        const double s = 0.05 + (0.95 - 0.05) * i / (n_pts - 1);
        xs[i] = s;
        ys[i] = k_mt * p.c0 * s;
    }
    const Eigen::VectorXd theta_fit = least_squares_fit(b, xs, ys);

    double max_resid = 0.0;
    for (int i = 0; i < n_pts; ++i)
        max_resid = std::max(max_resid, std::abs(flux(b, theta_fit, xs[i]) - ys[i]));

    BoundAssumptions a;
    a.gamma_theta = 2.0 * theta_fit.norm();
    a.eps_bar = max_resid;
    return a;
}

double disturbance_bound(const BoundAssumptions& a, const GainSolution& sol,
                         const ModelMatrices& m, const BasisBounds& bb) {
    a.validate();
    const double pe = (sol.p_mat * m.e).norm();
    return pe * (2.0 * (1.0 - a.rho) * bb.gamma_psi * a.gamma_theta + a.eps_bar) +
           sol.z_vec.norm() * a.w_bar;
}

CouplingGamma coupling_gamma(const BoundAssumptions& a, const ModelMatrices& m,
                             const BasisBounds& bb, const GainSolution& sol,
                             double beta) {
    a.validate();
    if (!(beta > 0.0)) throw validation_error("bounds: beta must be positive");
    if (!(sol.alpha_bar > 0.0))
        throw validation_error("bounds: alpha_bar must be positive");
    CouplingGamma g;
    g.gamma = a.rho * m.e.norm() * a.gamma_theta * bb.gamma_psi_tilde * a.gamma_s_tilde;
    g.max_admissible = std::sqrt(beta / sol.alpha_bar);
    g.compatible = g.gamma * g.gamma <= beta / sol.alpha_bar;
    return g;
}

UubRadii uub_radii(const BoundAssumptions& a, const GainSolution& sol,
                   const BasisBounds& bb, double delta_bar, double sigma) {
    a.validate();
    if (!(sigma > 0.0))
        throw validation_error("bounds: radii require sigma > 0");
    if (a.varrho >= 1.0)
        throw validation_error("bounds: radii require varrho < 1");
    const double gamma_c = 1.0;
    const double gamma_f = std::abs(sol.f_scalar);
    const double gamma_w = min_eig(Eigen::MatrixXd(sol.w_mat));
    if (!(gamma_w > 0.0))
        throw validation_error("bounds: radii require lambda_min(W) > 0");

    UubRadii r;
    r.gamma1 = a.gamma_theta +
               2.0 * gamma_f * bb.gamma_psi_tilde * a.w_bar / (sigma * gamma_c);
    r.gamma2 = a.gamma_theta + 2.0 * gamma_f * bb.gamma_psi / sigma;
    r.r_x_tilde = (sigma * gamma_c * r.gamma1 * r.gamma1 + 8.0 * delta_bar) /
                  (4.0 * (1.0 - a.varrho) * gamma_w);
    r.r_theta_tilde = std::max(
        r.gamma2, r.gamma1 / 2.0 + std::sqrt(r.gamma1 * r.gamma1 / 4.0 +
                                             2.0 * delta_bar / (sigma * gamma_c)));
    return r;
}

BoundReport make_bound_report(const BoundAssumptions& a, const GainSolution& sol,
                              const ModelMatrices& m, const RbfBasis& b,
                              double beta, double sigma) {
    a.validate();
    if (sigma < 0.0) throw validation_error("bounds: sigma must be nonnegative");
    const BasisBounds bb = basis_bounds(b);
    BoundReport rep;
    rep.gamma_psi = bb.gamma_psi;
    rep.gamma_psi_tilde = bb.gamma_psi_tilde;
    rep.gamma_e = m.e.norm();
    rep.gamma_c = 1.0;
    rep.gamma_f = std::abs(sol.f_scalar);
    rep.gamma_w = min_eig(Eigen::MatrixXd(sol.w_mat));
    const CouplingGamma g = coupling_gamma(a, m, bb, sol, beta);
    rep.gamma = g.gamma;
    rep.gamma_max_admissible = g.max_admissible;
    rep.gamma_compatible = g.compatible;
    rep.delta_bar = disturbance_bound(a, sol, m, bb);
    if (sigma > 0.0) {
        const UubRadii r = uub_radii(a, sol, bb, rep.delta_bar, sigma);
        rep.gamma1 = r.gamma1;
        rep.gamma2 = r.gamma2;
        rep.r_x_tilde = r.r_x_tilde;
        rep.r_theta_tilde = r.r_theta_tilde;
    }
    return rep;
}

Eigen::MatrixXd excitation_gram(const RbfBasis& b,
                                const std::vector<double>& s_path, double dt) {
    if (!(dt > 0.0)) throw validation_error("bounds: gram needs dt > 0");
    const int m = b.m();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd psi(m);
    for (double s : s_path) {
        evaluate_into(b, s, psi.data());
        g.noalias() += dt * psi * psi.transpose();
    }
    return g;
}

} // namespace drfb
