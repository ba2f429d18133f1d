#include "drfb/basis.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "drfb/errors.hpp"

namespace drfb {

void RbfBasis::validate() const {
    if (m() < 1) throw validation_error("basis: need at least one center");
    if (!(variance > 0.0)) throw validation_error("basis: variance must be positive");
    for (int j = 1; j < m(); ++j)
        if (!(centers[j] > centers[j - 1]))
            throw validation_error("basis: centers must be strictly increasing");
}

RbfBasis RbfBasis::uniform(int m, double lo, double hi, double variance,
                           VarianceConvention conv) {
    if (m < 2) throw validation_error("uniform basis: m must be at least 2");
    if (!(lo < hi)) throw validation_error("uniform basis: lo must be below hi");
    if (!(variance > 0.0)) throw validation_error("uniform basis: variance must be positive");
    RbfBasis b;
    b.centers.resize(m);
    for (int j = 0; j < m; ++j)
        b.centers[j] = lo + static_cast<double>(j) * (hi - lo) / static_cast<double>(m - 1);
    b.variance = variance;
    b.convention = conv;
    return b;
}

void evaluate_into(const RbfBasis& b, double s, double* out) {
    const int m = b.m();
    const double den = b.denom();
    // shift exponents by the smallest squared distance so the nearest
    // center always contributes exp(0); keeps the ratio exact and avoids
    // a 0/0 when s sits far outside the center span
    double dmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
        const double d = s - b.centers[j];
        const double dd = d * d;
        out[j] = dd;
        if (dd < dmin) dmin = dd;
    }
    double sum = 0.0;
    for (int j = 0; j < m; ++j) {
        const double phi = std::exp(-(out[j] - dmin) / den);
        out[j] = phi;
        sum += phi;
    }
    const double inv = 1.0 / sum;
    for (int j = 0; j < m; ++j) out[j] *= inv;
}

Eigen::VectorXd evaluate(const RbfBasis& b, double s) {
    Eigen::VectorXd psi(b.m());
    evaluate_into(b, s, psi.data());
    return psi;
}

Eigen::VectorXd evaluate_derivative(const RbfBasis& b, double s) {
    // psi_j' = psi_j (c_j - cbar) / v_eff with cbar the psi-weighted center mean
    const Eigen::VectorXd psi = evaluate(b, s);
    const double v_eff = b.denom() / 2.0;
    const double cbar = psi.dot(b.centers);
    return psi.cwiseProduct((b.centers.array() - cbar).matrix()) / v_eff;
}

double lipschitz_bound(const RbfBasis& b) {
    b.validate();
    if (b.m() == 1) return 0.0;
    const double lo = -0.2, hi = 1.2, h = 1e-4;
    const auto n = static_cast<std::size_t>(std::round((hi - lo) / h));
    double gmax = 0.0, modulus = 0.0, gprev = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = lo + static_cast<double>(i) * h;
        const double g = evaluate_derivative(b, s).norm();
        gmax = std::max(gmax, g);
        if (i > 0) modulus = std::max(modulus, std::abs(g - gprev));
        gprev = g;
    }
    return gmax + modulus;
}

double flux(const RbfBasis& b, const Eigen::VectorXd& theta, double s) {
    if (theta.size() != b.m()) {
        std::ostringstream os;
        os << "flux: theta has " << theta.size() << " entries, basis has " << b.m();
        throw validation_error(os.str());
    }
    return evaluate(b, s).dot(theta);
}

Eigen::VectorXd least_squares_fit(const RbfBasis& b, const Eigen::VectorXd& xs,
                                  const Eigen::VectorXd& ys) {
    if (xs.size() != ys.size() || xs.size() == 0)
        throw validation_error("least_squares_fit: sample size mismatch");
    Eigen::MatrixXd design(xs.size(), b.m());
    for (Eigen::Index i = 0; i < xs.size(); ++i)
        design.row(i) = evaluate(b, xs[i]).transpose();
    return design.colPivHouseholderQr().solve(ys);
}

} // namespace drfb
