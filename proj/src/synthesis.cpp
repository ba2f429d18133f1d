#include "drfb/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "drfb/errors.hpp"

namespace drfb {

void SynthesisConfig::validate() const {
    if (!(q_min > 0.0 && q_min <= q_max))
        throw validation_error("synthesis: need 0 < q_min <= q_max");
    if (!(beta > 0.0)) throw validation_error("synthesis: beta must be positive");
    if (kappa_z < 0.0 || kappa_f < 0.0)
        throw validation_error("synthesis: kappa weights must be nonnegative");
    if (!(omega_floor[0] > 0.0 && omega_floor[1] > 0.0))
        throw validation_error("synthesis: omega floor must be positive");
    if (!(tol > 0.0)) throw validation_error("synthesis: tol must be positive");
}

double GainSolution::lme_residual(const ModelMatrices& m) const {
    Eigen::Vector2d r = p_mat * m.e - Eigen::Vector2d(0.0, f_scalar);
    return r.norm();
}

namespace {

constexpr int kP11 = 0, kP22 = 1, kZ1 = 2, kZ2 = 3, kW1 = 4, kW2 = 5,
              kAbar = 6, kGz = 7, kGf = 8, kNumVars = 9;

// dP/dx_i under the elimination p12 = r12 p11
Eigen::Matrix2d p_coeff(int i, double r12) {
    Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
    if (i == kP11) m << 1.0, r12, r12, 0.0;
    if (i == kP22) m(1, 1) = 1.0;
    return m;
}

} // namespace

SdpProblem assemble(const SynthesisConfig& cfg, const ModelMatrices& m) {
    cfg.validate();
    if (m.e[1] == 0.0)
        throw validation_error("synthesis: e2 = 0, equality elimination impossible");
    const double r12 = -m.e[0] / m.e[1];
    // f reconstructs as fc1*p11 + fc2*p22
    const double fc1 = r12 * m.e[0];
    const double fc2 = m.e[1];

    SdpProblem p;
    p.n_vars = kNumVars;
    p.objective = Eigen::VectorXd::Zero(kNumVars);
    p.objective[kAbar] = 1.0;
    p.objective[kGz] = cfg.kappa_z;
    p.objective[kGf] = cfg.kappa_f;

    // two 4x4 vertex blocks [ -A'P - PA + C'Z' + ZC - beta I - W , P ; P , abar I ]
    for (double q : {cfg.q_min, cfg.q_max}) {
        const Eigen::Matrix2d a = m.a_of(q);
        SdpBlock blk;
        blk.constant = Eigen::MatrixXd::Zero(4, 4);
        blk.constant.topLeftCorner(2, 2) = -cfg.beta * Eigen::Matrix2d::Identity();
        blk.coeff.assign(kNumVars, Eigen::MatrixXd::Zero(4, 4));
        for (int i = 0; i < kNumVars; ++i) {
            const Eigen::Matrix2d dp = p_coeff(i, r12);
            Eigen::Matrix2d top = -(a.transpose() * dp + dp * a);
            if (i == kZ1) top += (Eigen::Matrix2d() << 0.0, 1.0, 1.0, 0.0).finished();
            if (i == kZ2) top += (Eigen::Matrix2d() << 0.0, 0.0, 0.0, 2.0).finished();
            if (i == kW1) top(0, 0) -= 1.0;
            if (i == kW2) top(1, 1) -= 1.0;
            blk.coeff[i].topLeftCorner(2, 2) = top;
            blk.coeff[i].topRightCorner(2, 2) = dp;
            blk.coeff[i].bottomLeftCorner(2, 2) = dp;
            if (i == kAbar) blk.coeff[i].bottomRightCorner(2, 2) = Eigen::Matrix2d::Identity();
        }
        p.blocks.push_back(std::move(blk));
    }

    // 3x3 cap  [ gz I , z ; z' , gz ]  enforcing ||z|| <= gz
    {
        SdpBlock blk;
        blk.constant = Eigen::MatrixXd::Zero(3, 3);
        blk.coeff.assign(kNumVars, Eigen::MatrixXd::Zero(3, 3));
        blk.coeff[kZ1](0, 2) = blk.coeff[kZ1](2, 0) = 1.0;
        blk.coeff[kZ2](1, 2) = blk.coeff[kZ2](2, 1) = 1.0;
        blk.coeff[kGz] = Eigen::MatrixXd::Identity(3, 3);
        p.blocks.push_back(std::move(blk));
    }

    // 2x2 cap  [ gf , f ; f , gf ]  with f = fc1 p11 + fc2 p22
    {
        SdpBlock blk;
        blk.constant = Eigen::MatrixXd::Zero(2, 2);
        blk.coeff.assign(kNumVars, Eigen::MatrixXd::Zero(2, 2));
        blk.coeff[kP11](0, 1) = blk.coeff[kP11](1, 0) = fc1;
        blk.coeff[kP22](0, 1) = blk.coeff[kP22](1, 0) = fc2;
        blk.coeff[kGf] = Eigen::MatrixXd::Identity(2, 2);
        p.blocks.push_back(std::move(blk));
    }

    // P >= 0
    {
        SdpBlock blk;
        blk.constant = Eigen::MatrixXd::Zero(2, 2);
        blk.coeff.reserve(kNumVars);
        for (int i = 0; i < kNumVars; ++i) blk.coeff.push_back(p_coeff(i, r12));
        p.blocks.push_back(std::move(blk));
    }

    // scalar floors: w >= omega, gz >= 0, gf >= 0
    auto scalar_block = [&](int var, double floor) {
        SdpBlock blk;
        blk.constant = Eigen::MatrixXd::Constant(1, 1, -floor);
        blk.coeff.assign(kNumVars, Eigen::MatrixXd::Zero(1, 1));
        blk.coeff[var](0, 0) = 1.0;
        p.blocks.push_back(std::move(blk));
    };
    scalar_block(kW1, cfg.omega_floor[0]);
    scalar_block(kW2, cfg.omega_floor[1]);
    scalar_block(kGz, 0.0);
    scalar_block(kGf, 0.0);
    return p;
}

GainSolution synthesize(const SynthesisConfig& cfg, const ModelMatrices& m,
                        const SdpOptions* opts) {
    const SdpProblem prob = assemble(cfg, m);
    SdpOptions o = opts ? *opts : SdpOptions{};
    o.tol = cfg.tol;
    const SdpSolution s = solve(prob, o);
    if (s.status == SdpStatus::infeasible) {
        std::ostringstream os;
        os << "synthesis infeasible: no strictly feasible point found (phase-1 margin "
           << s.phase1_margin << " after " << s.iterations
           << " steps); consider lowering beta (e.g. beta/10)";
        throw infeasible_error(os.str());
    }
    if (s.status == SdpStatus::stalled)
        throw infeasible_error("synthesis stalled before reaching the requested tolerance");

    const double r12 = -m.e[0] / m.e[1];
    GainSolution g;
    g.status = s.status;
    g.objective = s.objective_value;
    const double p11 = s.x[kP11], p22 = s.x[kP22], p12 = r12 * p11;
    g.p_mat << p11, p12, p12, p22;
    g.z_vec << s.x[kZ1], s.x[kZ2];
    g.f_scalar = p12 * m.e[0] + p22 * m.e[1];
    g.w_mat = Eigen::Vector2d(s.x[kW1], s.x[kW2]).asDiagonal();
    g.alpha_bar = s.x[kAbar];
    g.gamma_z = s.x[kGz];
    g.gamma_f = s.x[kGf];
    g.l_gain = g.p_mat.ldlt().solve(g.z_vec);
    g.margins = s.block_min_eig;
    return g;
}

CertificateReport certify(const GainSolution& sol, const SynthesisConfig& cfg,
                          const ModelMatrices& m, int grid_n) {
    if (grid_n < 2) throw validation_error("certify: need at least 2 grid points");
    CertificateReport rep;
    rep.lme_residual = sol.lme_residual(m);
    rep.min_margin = std::numeric_limits<double>::infinity();
    rep.scaled_form_min_margin = std::numeric_limits<double>::infinity();

    const Eigen::Matrix2d wbar =
        cfg.beta * Eigen::Matrix2d::Identity() + sol.w_mat;
    const double alpha = 1.0 / sol.alpha_bar;
    for (int k = 0; k < grid_n; ++k) {
        const double q = cfg.q_min + (cfg.q_max - cfg.q_min) * k / (grid_n - 1);
        const Eigen::Matrix2d a = m.a_of(q);
        const Eigen::RowVector2d c = ModelMatrices::c_row();
        const Eigen::Matrix2d top =
            -(a.transpose() * sol.p_mat + sol.p_mat * a) +
            c.transpose() * sol.z_vec.transpose() + sol.z_vec * c - wbar;

        Eigen::Matrix4d vertex;
        vertex << top, sol.p_mat, sol.p_mat,
            sol.alpha_bar * Eigen::Matrix2d::Identity();
        rep.q_grid.push_back(q);
        const double mg = min_eig(vertex);
        rep.margins.push_back(mg);
        rep.min_margin = std::min(rep.min_margin, mg);

        Eigen::Matrix4d scaled;
        scaled << top, std::sqrt(alpha) * sol.p_mat, std::sqrt(alpha) * sol.p_mat,
            Eigen::Matrix2d::Identity();
        rep.scaled_form_min_margin =
            std::min(rep.scaled_form_min_margin, min_eig(scaled));
    }
    return rep;
}

} // namespace drfb
