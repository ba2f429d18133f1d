#include <doctest.h>

#include <cmath>

#include "drfb/battery.hpp"
#include "drfb/errors.hpp"
#include "drfb/synthesis.hpp"

using namespace drfb;

namespace {

SynthesisConfig base_cfg(double tol) {
    SynthesisConfig cfg{8.1 / 60000.0, 9.9 / 60000.0};
    cfg.tol = tol;
    return cfg;
}

} // namespace

TEST_CASE("assembled problem shape") {
    const BatteryParams p;
    const SdpProblem prob = assemble(base_cfg(1e-8), assemble_matrices(p));
    CHECK(prob.n_vars == 9);
    REQUIRE(prob.blocks.size() == 9);
    CHECK(prob.blocks[0].constant.rows() == 4);
    CHECK(prob.blocks[1].constant.rows() == 4);
    CHECK(prob.blocks[2].constant.rows() == 3);
    CHECK(prob.blocks[3].constant.rows() == 2);
    CHECK(prob.blocks[4].constant.rows() == 2);
    for (int i = 5; i < 9; ++i) CHECK(prob.blocks[i].constant.rows() == 1);
    prob.validate();
}

TEST_CASE("moderate-accuracy gains match stored solve") {
    const BatteryParams p;
    const ModelMatrices mm = assemble_matrices(p);
    const GainSolution g = synthesize(base_cfg(5e-4), mm);
    CHECK(g.status == SdpStatus::optimal);

    CHECK(g.p_mat(0, 0) == doctest::Approx(0.013167390768669653).epsilon(1e-9));
    CHECK(g.p_mat(1, 1) == doctest::Approx(0.00012099449786343296).epsilon(1e-9));
    CHECK(g.p_mat(0, 1) == doctest::Approx(-0.00045464531438447196).epsilon(1e-9));
    CHECK(g.p_mat(0, 1) == g.p_mat(1, 0));
    CHECK(g.z_vec[0] == doctest::Approx(0.00012436245518561415).epsilon(1e-9));
    CHECK(g.z_vec[1] == doctest::Approx(8.864039035429281e-05).epsilon(1e-9));
    CHECK(std::abs(g.w_mat(0, 0) - 1.0005876558551507e-06) <= 1e-9 * 1.0005876558551507e-06);
    CHECK(std::abs(g.w_mat(1, 1) - 4.325936412784442e-05) <= 1e-9 * 4.325936412784442e-05);
    CHECK(g.w_mat(0, 1) == 0.0);
    CHECK(g.alpha_bar == doctest::Approx(1.7187063444338582).epsilon(1e-9));
    CHECK(g.gamma_z == doctest::Approx(0.0001645266713749533).epsilon(1e-9));
    CHECK(g.gamma_f == doctest::Approx(3.6020999217115413).epsilon(1e-9));
    CHECK(g.objective == doctest::Approx(1.7189068921044504).epsilon(1e-9));
    CHECK(g.f_scalar == doctest::Approx(-1.7327186766009528).epsilon(1e-9));
    CHECK(g.l_gain[0] == doctest::Approx(0.03991917086577871).epsilon(1e-8));
    CHECK(g.l_gain[1] == doctest::Approx(0.8825976075628329).epsilon(1e-8));

    CHECK(g.lme_residual(mm) <= 1e-10);
    for (double margin : g.margins) CHECK(margin >= -1e-9);
}

TEST_CASE("tight-accuracy gains match stored solve") {
    const BatteryParams p;
    const ModelMatrices mm = assemble_matrices(p);
    const GainSolution g = synthesize(base_cfg(1e-8), mm);
    CHECK(g.status == SdpStatus::optimal);

    CHECK(g.p_mat(0, 0) == doctest::Approx(0.013167072456849189).epsilon(1e-9));
    CHECK(std::abs(g.p_mat(1, 1) - 1.5698450827143935e-05) <= 1e-9 * 1.5698450827143935e-05);
    CHECK(std::abs(g.p_mat(0, 1) + 0.000454634323674146) <= 1e-9 * 0.000454634323674146);
    CHECK(std::abs(g.z_vec[0] - 0.00010099749275116638) <= 1e-9 * 0.00010099749275116638);
    CHECK(std::abs(g.z_vec[1] - 5.2303482376986354e-05) <= 1e-9 * 5.2303482376986354e-05);
    CHECK(std::abs(g.w_mat(0, 0) - 1.000000005876064e-06) <= 1e-12);
    CHECK(std::abs(g.w_mat(1, 1) - 1.0004348982730647e-06) <= 1e-12);
    CHECK(g.alpha_bar == doctest::Approx(1.7186863451091303).epsilon(1e-9));
    CHECK(std::abs(g.gamma_z - 0.00011373728745436413) <= 1e-9 * 0.00011373728745436413);
    CHECK(g.objective == doctest::Approx(1.7188000827311074).epsilon(1e-9));
    // f is the near-cancelling sum p12 e1 + p22 e2 of two ~0.26 terms, so a
    // 1e-9 wobble in P moves f (and the gain it feeds) by ~2e-5 relative
    CHECK(std::abs(g.gamma_f - 3.345225552622437e-05) <= 1e-4 * 3.345225552622437e-05);
    CHECK(std::abs(g.f_scalar + 1.2836538601734837e-05) <= 1e-4 * 1.2836538601734837e-05);
    CHECK(g.l_gain[0] == doctest::Approx(2469.46482294773).epsilon(1e-4));
    CHECK(g.l_gain[1] == doctest::Approx(71520.1637067891).epsilon(1e-4));

    CHECK(g.lme_residual(mm) <= 1e-10);
    for (double margin : g.margins) CHECK(margin >= -1e-9);
}

TEST_CASE("output-injection scalar shrinks as the barrier tightens") {
    const BatteryParams p;
    const ModelMatrices m = assemble_matrices(p);
    const GainSolution coarse = synthesize(base_cfg(5e-4), m);
    const GainSolution tight = synthesize(base_cfg(1e-8), m);
    CHECK(std::abs(tight.f_scalar) < std::abs(coarse.f_scalar));
    CHECK(tight.l_gain.norm() > coarse.l_gain.norm());
    CHECK(tight.objective < coarse.objective);
}

TEST_CASE("degenerate flow interval") {
    const BatteryParams p;
    SynthesisConfig cfg = base_cfg(1e-8);
    cfg.q_min = cfg.q_max = 9.0 / 60000.0;
    const GainSolution g = synthesize(cfg, assemble_matrices(p));
    CHECK(g.status == SdpStatus::optimal);
    CHECK(g.objective == doctest::Approx(1.3922473691059436).epsilon(1e-9));
}

TEST_CASE("vertex order does not change the optimum") {
    const BatteryParams p;
    const ModelMatrices m = assemble_matrices(p);
    const SdpProblem pa = assemble(base_cfg(1e-8), m);
    SdpProblem pb = pa;
    std::swap(pb.blocks[0], pb.blocks[1]);
    const SdpSolution sa = solve(pa);
    const SdpSolution sb = solve(pb);
    CHECK(sa.objective_value == sb.objective_value);
}

TEST_CASE("faster plant still synthesizes") {
    // ten times the pumping rate means ten times the cell turnover A21
    const BatteryParams p;
    SynthesisConfig cfg = base_cfg(1e-8);
    cfg.q_min *= 10.0;
    cfg.q_max *= 10.0;
    const GainSolution g = synthesize(cfg, assemble_matrices(p));
    CHECK(g.status == SdpStatus::optimal);
    CHECK(g.objective == doctest::Approx(0.0173004865543368).epsilon(1e-8));
}

TEST_CASE("injection-norm weight steers the objective monotonically") {
    const BatteryParams p;
    const ModelMatrices m = assemble_matrices(p);
    double prev = -1.0;
    const double kappas[3] = {0.1, 1.0, 10.0};
    const double expected[3] = {1.7186977185478562, 1.7188000827311074, 1.7198236197329464};
    for (int i = 0; i < 3; ++i) {
        SynthesisConfig cfg = base_cfg(1e-8);
        cfg.kappa_z = kappas[i];
        const GainSolution g = synthesize(cfg, m);
        CHECK(g.objective == doctest::Approx(expected[i]).epsilon(1e-9));
        CHECK(g.objective > prev);
        prev = g.objective;
    }
}

TEST_CASE("unattainable decay rate reports infeasibility") {
    const BatteryParams p;
    SynthesisConfig cfg = base_cfg(1e-8);
    cfg.beta = 1e9;
    CHECK_THROWS_AS(synthesize(cfg, assemble_matrices(p)), infeasible_error);
}

TEST_CASE("config validation") {
    SynthesisConfig cfg = base_cfg(1e-8);
    cfg.q_min = -1.0;
    CHECK_THROWS_AS(cfg.validate(), validation_error);
    cfg = base_cfg(1e-8);
    cfg.q_max = cfg.q_min / 2.0;
    CHECK_THROWS_AS(cfg.validate(), validation_error);
    cfg = base_cfg(1e-8);
    cfg.beta = 0.0;
    CHECK_THROWS_AS(cfg.validate(), validation_error);
    cfg = base_cfg(0.0);
    CHECK_THROWS_AS(cfg.validate(), validation_error);
}

TEST_CASE("certificate grid reproduces vertex margins and stays convex") {
    const BatteryParams p;
    const ModelMatrices m = assemble_matrices(p);
    const SynthesisConfig cfg = base_cfg(1e-8);
    const GainSolution g = synthesize(cfg, m);

    const CertificateReport two = certify(g, cfg, m, 2);
    REQUIRE(two.q_grid.size() == 2);
    CHECK(two.q_grid.front() == cfg.q_min);
    CHECK(two.q_grid.back() == cfg.q_max);
    // vertex margins of the stored solve, reproduced through the grid path
    // (same eigensolver on the same matrix up to summation order)
    CHECK(std::abs(two.margins[0] - g.margins[0]) <= 5e-12);
    CHECK(std::abs(two.margins[1] - g.margins[1]) <= 5e-12);
    CHECK(two.lme_residual <= 1e-10);

    const CertificateReport fine = certify(g, cfg, m, 101);
    REQUIRE(fine.q_grid.size() == 101);
    CHECK(fine.min_margin >= -1e-9);
    // the vertex margin matrix is affine in q, so interior margins are concave
    // along the grid and must dominate the endpoint minimum
    const double end_min = std::min(fine.margins.front(), fine.margins.back());
    for (double mg : fine.margins) CHECK(mg >= end_min - 1e-12);
    CHECK(fine.scaled_form_min_margin >= -1e-9);
}
