#include "drfb/sdp.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "drfb/errors.hpp"

namespace drfb {

void SdpProblem::validate() const {
    if (n_vars < 1 || n_vars > 64) throw validation_error("sdp: n_vars out of range");
    if (objective.size() != n_vars) throw validation_error("sdp: objective size mismatch");
    if (blocks.empty()) throw validation_error("sdp: no constraint blocks");
    for (const auto& b : blocks) {
        const auto d = b.constant.rows();
        if (d < 1 || b.constant.cols() != d)
            throw validation_error("sdp: block constant not square");
        if (static_cast<int>(b.coeff.size()) != n_vars)
            throw validation_error("sdp: block coefficient count mismatch");
        auto check_sym = [d](const Eigen::MatrixXd& m) {
            if (m.rows() != d || m.cols() != d)
                throw validation_error("sdp: block coefficient size mismatch");
            if ((m - m.transpose()).cwiseAbs().maxCoeff() >
                1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))
                throw validation_error("sdp: block matrix not symmetric");
        };
        check_sym(b.constant);
        for (const auto& c : b.coeff) check_sym(c);
    }
}

int SdpProblem::barrier_order() const {
    int nu = 0;
    for (const auto& b : blocks) nu += static_cast<int>(b.constant.rows());
    return nu;
}

double min_eig(const Eigen::MatrixXd& sym) {
    const auto n = sym.rows();
    if (sym.cols() != n) throw validation_error("min_eig: matrix not square");
    if ((sym - sym.transpose()).cwiseAbs().maxCoeff() >
        1e-9 * std::max(1.0, sym.cwiseAbs().maxCoeff()))
        throw validation_error("min_eig: matrix not symmetric");
    if (n == 1) return sym(0, 0);

    Eigen::MatrixXd a = 0.5 * (sym + sym.transpose());
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    auto offdiag = [&a, n]() {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
        return std::sqrt(2.0 * s);
    };
    for (int sweep = 0; sweep < 100 && offdiag() > 1e-12 * scale; ++sweep) {
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    double lo = a(0, 0);
    for (Eigen::Index i = 1; i < n; ++i) lo = std::min(lo, a(i, i));
    return lo;
}

namespace {

// barrier machinery over a block list; kept separate from SdpProblem so
// the phase-1 augmentation can reuse it
struct Barrier {
    const std::vector<SdpBlock>* blocks;
    int n;

    Eigen::MatrixXd value(const Eigen::VectorXd& x, std::size_t k) const {
        const auto& b = (*blocks)[k];
        Eigen::MatrixXd m = b.constant;
        for (int i = 0; i < n; ++i)
            if (x[i] != 0.0) m.noalias() += x[i] * b.coeff[i];
        return m;
    }

    bool feasible(const Eigen::VectorXd& x) const {
        for (std::size_t k = 0; k < blocks->size(); ++k) {
            Eigen::LLT<Eigen::MatrixXd> llt(value(x, k));
            if (llt.info() != Eigen::Success) return false;
        }
        return true;
    }

    double phi(const Eigen::VectorXd& x) const {
        double s = 0.0;
        for (std::size_t k = 0; k < blocks->size(); ++k) {
            Eigen::LLT<Eigen::MatrixXd> llt(value(x, k));
            if (llt.info() != Eigen::Success)
                return std::numeric_limits<double>::infinity();
            s -= 2.0 * llt.matrixLLT().diagonal().array().log().sum();
        }
        return s;
    }

    void grad_hess(const Eigen::VectorXd& x, Eigen::VectorXd& g,
                   Eigen::MatrixXd& h) const {
        g.setZero(n);
        h.setZero(n, n);
        std::vector<Eigen::MatrixXd> s(static_cast<std::size_t>(n));
        for (std::size_t k = 0; k < blocks->size(); ++k) {
            const Eigen::MatrixXd m = value(x, k);
            const Eigen::MatrixXd minv = m.ldlt().solve(
                Eigen::MatrixXd::Identity(m.rows(), m.cols()));
            const auto& coeff = (*blocks)[k].coeff;
            for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)].noalias() = minv * coeff[i];
            for (int i = 0; i < n; ++i) {
                g[i] -= s[static_cast<std::size_t>(i)].trace();
                for (int j = i; j < n; ++j)
                    h(i, j) += s[static_cast<std::size_t>(i)]
                                   .cwiseProduct(s[static_cast<std::size_t>(j)].transpose())
                                   .sum();
            }
        }
        h.triangularView<Eigen::StrictlyLower>() = h.transpose();
    }

    // damped Newton centering for t*c'x + phi(x); returns Newton steps
    // taken; early_exit(x) aborts as soon as it turns true
    template <typename Stop>
    int center(Eigen::VectorXd& x, double t, const Eigen::VectorXd& c,
               double tol, int iters, const Stop& early_exit) const {
        Eigen::VectorXd g, grad, dx;
        Eigen::MatrixXd h;
        int made = 0;
        for (int it = 0; it < iters; ++it) {
            grad_hess(x, g, h);
            grad = t * c + g;
            h.diagonal().array() += 1e-14;
            dx = h.ldlt().solve(-grad);
            const double lam2 = -grad.dot(dx);
            if (!(lam2 > 0.0) || !dx.allFinite()) break;
            const double f0 = t * c.dot(x) + phi(x);
            double step = 1.0;
            Eigen::VectorXd xn = x + dx;
            while (step > 1e-18) {
                xn = x + step * dx;
                if (feasible(xn) && t * c.dot(xn) + phi(xn) < f0) break;
                step *= 0.5;
            }
            if (step <= 1e-18) break;
            x = xn;
            ++made;
            if (early_exit(x)) return made;
            if (0.5 * lam2 < tol) break;
        }
        return made;
    }
};

void dump_iterate(const std::string& path, bool header, double t,
                  const Eigen::VectorXd& x) {
    std::ofstream f(path, header ? std::ios::trunc : std::ios::app);
    if (header) {
        f << "t";
        for (Eigen::Index i = 0; i < x.size(); ++i) f << ",x" << i;
        f << "\n";
    }
    f << t;
    f.precision(17);
    for (Eigen::Index i = 0; i < x.size(); ++i) f << "," << x[i];
    f << "\n";
}

} // namespace

bool phase1(const SdpProblem& p, Eigen::VectorXd& x_out, const SdpOptions& opt,
            int* newton_steps, double* final_margin) {
    p.validate();
    const int n = p.n_vars;
    // augmented problem: minimize s subject to block(x) + s*I >= 0
    std::vector<SdpBlock> aug;
    aug.reserve(p.blocks.size());
    for (const auto& b : p.blocks) {
        SdpBlock a;
        a.constant = b.constant;
        a.coeff = b.coeff;
        a.coeff.push_back(Eigen::MatrixXd::Identity(b.constant.rows(), b.constant.cols()));
        aug.push_back(std::move(a));
    }
    Barrier bar{&aug, n + 1};
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
    c[n] = 1.0;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n + 1);
    double s0 = 0.0;
    for (std::size_t k = 0; k < p.blocks.size(); ++k)
        s0 = std::max(s0, -min_eig(p.blocks[k].constant));
    x[n] = s0 + 1.0;

    const double accept = -opt.feas_margin;
    auto strictly_feasible = [&](const Eigen::VectorXd& xx) { return xx[n] < accept; };

    int total = 0;
    double t = opt.t0;
    for (int outer = 0; outer < opt.max_outer && t <= opt.phase1_t_cap; ++outer) {
        total += bar.center(x, t, c, opt.newton_tol, opt.newton_iters, strictly_feasible);
        if (strictly_feasible(x)) break;
        t *= opt.mu;
    }
    if (newton_steps) *newton_steps += total;
    if (final_margin) *final_margin = x[n];
    if (!strictly_feasible(x)) return false;
    x_out = x.head(n);
    return true;
}

SdpSolution solve(const SdpProblem& p, const SdpOptions& opt) {
    p.validate();
    SdpSolution sol;
    sol.x = Eigen::VectorXd::Zero(p.n_vars);

    int steps = 0;
    Eigen::VectorXd x;
    if (!phase1(p, x, opt, &steps, &sol.phase1_margin)) {
        sol.status = SdpStatus::infeasible;
        sol.iterations = steps;
        return sol;
    }

    Barrier bar{&p.blocks, p.n_vars};
    const double nu = p.barrier_order();
    double t = opt.t0;
    bool header = true;
    auto never = [](const Eigen::VectorXd&) { return false; };
    int outer = 0;
    for (; outer < opt.max_outer; ++outer) {
        steps += bar.center(x, t, p.objective, opt.newton_tol, opt.newton_iters, never);
        if (!opt.trace_csv.empty()) {
            dump_iterate(opt.trace_csv, header, t, x);
            header = false;
        }
        if (nu / t <= opt.tol) break;
        t *= opt.mu;
    }
    sol.status = (outer >= opt.max_outer) ? SdpStatus::stalled : SdpStatus::optimal;
    sol.x = x;
    sol.objective_value = p.objective.dot(x);
    sol.iterations = steps;
    sol.block_min_eig.reserve(p.blocks.size());
    Barrier full{&p.blocks, p.n_vars};
    for (std::size_t k = 0; k < p.blocks.size(); ++k)
        sol.block_min_eig.push_back(min_eig(full.value(x, k)));
    return sol;
}

} // namespace drfb
