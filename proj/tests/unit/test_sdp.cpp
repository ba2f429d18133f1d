#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "drfb/errors.hpp"
#include "drfb/sdp.hpp"

using namespace drfb;

namespace {

SdpBlock scalar_lb(int n_vars, int var, double lb, double sign = 1.0) {
    SdpBlock b;
    b.constant = Eigen::MatrixXd::Constant(1, 1, -sign * lb);
    b.coeff.assign(n_vars, Eigen::MatrixXd::Zero(1, 1));
    b.coeff[var](0, 0) = sign;
    return b;
}

} // namespace

TEST_CASE("min_eig jacobi oracle") {
    CHECK(min_eig(Eigen::MatrixXd::Identity(4, 4)) == doctest::Approx(1.0).epsilon(1e-12));
    Eigen::MatrixXd d = Eigen::Vector2d(3.0, -2.0).asDiagonal();
    CHECK(min_eig(d) == doctest::Approx(-2.0).epsilon(1e-12));

    Eigen::Matrix3d m3;
    m3 << 2.0, 1.0, 0.5, 1.0, 3.0, 0.25, 0.5, 0.25, 1.5;
    CHECK(min_eig(m3) == doctest::Approx(1.1018191656961949).epsilon(1e-10));

    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Eigen::MatrixXd r(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) r(i, j) = U(gen);
    const Eigen::MatrixXd sym = 0.5 * (r + r.transpose());
    const double expected =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym).eigenvalues().minCoeff();
    CHECK(std::abs(min_eig(sym) - expected) <= 1e-10);

    Eigen::MatrixXd bad(2, 2);
    bad << 0.0, 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(min_eig(bad), validation_error);
}

TEST_CASE("nonnegativity cone example") {
    SdpProblem p;
    p.n_vars = 1;
    p.objective = Eigen::VectorXd::Ones(1);
    p.blocks.push_back(scalar_lb(1, 0, 0.0));
    const SdpSolution s = solve(p);
    CHECK(s.status == SdpStatus::optimal);
    CHECK(std::abs(s.x[0]) <= 1e-6);
    CHECK(s.block_min_eig[0] >= -1e-9);
}

TEST_CASE("componentwise bound example") {
    SdpProblem p;
    p.n_vars = 2;
    p.objective = Eigen::VectorXd::Ones(2);
    SdpBlock b;
    b.constant = -Eigen::MatrixXd::Identity(2, 2);
    b.coeff.assign(2, Eigen::MatrixXd::Zero(2, 2));
    b.coeff[0](0, 0) = 1.0;
    b.coeff[1](1, 1) = 1.0;
    p.blocks.push_back(b);
    const SdpSolution s = solve(p);
    CHECK(s.status == SdpStatus::optimal);
    CHECK(std::abs(s.x[0] - 1.0) <= 1e-6);
    CHECK(std::abs(s.x[1] - 1.0) <= 1e-6);
}

TEST_CASE("correlation bound example") {
    SdpProblem p;
    p.n_vars = 1;
    p.objective = Eigen::VectorXd::Ones(1);
    SdpBlock b;
    b.constant = Eigen::MatrixXd::Identity(2, 2);
    b.coeff.assign(1, Eigen::MatrixXd::Zero(2, 2));
    b.coeff[0](0, 1) = b.coeff[0](1, 0) = 1.0;
    p.blocks.push_back(b);
    const SdpSolution s = solve(p);
    CHECK(s.status == SdpStatus::optimal);
    CHECK(std::abs(s.x[0] + 1.0) <= 1e-6);
}

TEST_CASE("phase one on constant blocks") {
    SdpProblem p;
    p.n_vars = 1;
    p.objective = Eigen::VectorXd::Zero(1);
    SdpBlock b;
    b.constant = Eigen::MatrixXd::Identity(3, 3);
    b.coeff.assign(1, Eigen::MatrixXd::Zero(3, 3));
    p.blocks.push_back(b);
    Eigen::VectorXd x;
    CHECK(phase1(p, x));

    SdpProblem q;
    q.n_vars = 1;
    q.objective = Eigen::VectorXd::Zero(1);
    SdpBlock nb;
    nb.constant = -Eigen::MatrixXd::Identity(3, 3);
    nb.coeff.assign(1, Eigen::MatrixXd::Zero(3, 3));
    q.blocks.push_back(nb);
    CHECK_FALSE(phase1(q, x));
    const SdpSolution s = solve(q);
    CHECK(s.status == SdpStatus::infeasible);
}

TEST_CASE("determinism and outer-iteration monotonicity") {
    SdpProblem p;
    p.n_vars = 2;
    p.objective = Eigen::Vector2d(1.0, 2.0);
    p.blocks.push_back(scalar_lb(2, 0, 0.3));
    p.blocks.push_back(scalar_lb(2, 1, -0.7));
    const SdpSolution a = solve(p);
    const SdpSolution b = solve(p);
    CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.iterations == b.iterations);
    CHECK(a.status == SdpStatus::optimal);
    CHECK(std::abs(a.objective_value - (0.3 - 1.4)) <= 1e-6);
}

TEST_CASE("validation rejects malformed problems") {
    SdpProblem p;
    p.n_vars = 1;
    p.objective = Eigen::VectorXd::Ones(1);
    SdpBlock b;
    b.constant = Eigen::MatrixXd::Zero(2, 2);
    b.coeff.assign(1, Eigen::MatrixXd::Zero(2, 2));
    b.coeff[0](0, 1) = 1.0; // not symmetric
    p.blocks.push_back(b);
    CHECK_THROWS_AS(p.validate(), validation_error);

    SdpProblem empty;
    empty.n_vars = 1;
    empty.objective = Eigen::VectorXd::Ones(1);
    CHECK_THROWS_AS(empty.validate(), validation_error);
}

TEST_CASE("analytic optima library") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> U(0.2, 2.0);
    int solved = 0;
    for (int k = 0; k < 17; ++k) {
        SdpProblem p;
        double expected = 0.0;
        switch (k % 3) {
        case 0: { // weighted box lower bounds
            p.n_vars = 3;
            Eigen::Vector3d c, l;
            for (int i = 0; i < 3; ++i) {
                c[i] = U(gen);
                l[i] = U(gen) - 1.0;
            }
            p.objective = c;
            for (int i = 0; i < 3; ++i) p.blocks.push_back(scalar_lb(3, i, l[i]));
            expected = c.dot(l);
            break;
        }
        case 1: { // 2x2 correlation floor: min x with [[a,x],[x,b]] psd
            p.n_vars = 1;
            const double a = U(gen), bb = U(gen);
            p.objective = Eigen::VectorXd::Ones(1);
            SdpBlock blk;
            blk.constant = Eigen::Vector2d(a, bb).asDiagonal();
            blk.coeff.assign(1, Eigen::MatrixXd::Zero(2, 2));
            blk.coeff[0](0, 1) = blk.coeff[0](1, 0) = 1.0;
            p.blocks.push_back(blk);
            expected = -std::sqrt(a * bb);
            break;
        }
        default: { // spectral floor: min t with t I - D psd, D diagonal
            p.n_vars = 1;
            Eigen::Vector3d d;
            for (int i = 0; i < 3; ++i) d[i] = U(gen);
            p.objective = Eigen::VectorXd::Ones(1);
            SdpBlock blk;
            blk.constant = (-d).asDiagonal();
            blk.coeff.assign(1, Eigen::MatrixXd::Identity(3, 3));
            p.blocks.push_back(blk);
            expected = d.maxCoeff();
            break;
        }
        }
        const SdpSolution s = solve(p);
        CHECK(s.status == SdpStatus::optimal);
        CHECK(std::abs(s.objective_value - expected) <= 1e-6);
        ++solved;
    }
    CHECK(solved == 17);
}
