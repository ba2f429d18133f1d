#pragma once

#include <Eigen/Dense>

namespace drfb {

// Gaussian width convention: `half` reads the configured variance as the
// sigma^2 in exp(-d^2/(2 sigma^2)); `plain` puts it straight in the
// denominator, exp(-d^2/variance).
enum class VarianceConvention { half, plain };

// Normalized (softmax-of-Gaussians) radial basis. Normalization gives a
// partition of unity and the tight norm certificate ||Psi(s)|| <= 1.
struct RbfBasis {
    Eigen::VectorXd centers;
    double variance = 0.0081;
    VarianceConvention convention = VarianceConvention::half;

    int m() const { return static_cast<int>(centers.size()); }
    void validate() const;

    static RbfBasis uniform(int m, double lo, double hi, double variance,
                            VarianceConvention conv = VarianceConvention::half);

    // effective 2 sigma^2 of the exponent
    double denom() const {
        return convention == VarianceConvention::half ? 2.0 * variance : variance;
    }
};

// Psi(s); total on the real line, stabilized against underflow far from
// the centers.
Eigen::VectorXd evaluate(const RbfBasis& b, double s);

// allocation-free variant for hot loops; out must hold m doubles
void evaluate_into(const RbfBasis& b, double s, double* out);

// dPsi/ds (analytic)
Eigen::VectorXd evaluate_derivative(const RbfBasis& b, double s);

// Certified overestimate of sup ||dPsi/ds|| over [-0.2, 1.2]: dense-grid
// maximum at step 1e-4 plus the grid modulus (max adjacent difference).
double lipschitz_bound(const RbfBasis& b);

double flux(const RbfBasis& b, const Eigen::VectorXd& theta, double s);

// Plain least-squares fit of theta to samples (xs, ys).
Eigen::VectorXd least_squares_fit(const RbfBasis& b, const Eigen::VectorXd& xs,
                                  const Eigen::VectorXd& ys);

} // namespace drfb
