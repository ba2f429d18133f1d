#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "drfb/config.hpp"
#include "drfb/errors.hpp"
#include "drfb/jsonio.hpp"
#include "drfb/svg.hpp"

using namespace drfb;

namespace {

std::string thrown_message(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

GainSolution sample_gains() {
    GainSolution g;
    g.p_mat << 0.0132, -4.5e-4, -4.5e-4, 1.2e-4;
    g.z_vec << 1.24e-4, 8.86e-5;
    g.l_gain << 0.0399, 0.8826;
    g.f_scalar = -1.7327;
    g.w_mat = Eigen::Vector2d(1.0e-6, 4.3e-5).asDiagonal();
    g.alpha_bar = 1.7187;
    g.gamma_z = 1.6e-4;
    g.gamma_f = 3.602;
    g.margins = {1e-10, 2e-10, 3e-10};
    g.objective = 1.7189;
    g.status = SdpStatus::optimal;
    return g;
}

} // namespace

TEST_CASE("config defaults plus required basis size") {
    const RunConfig c = parse_config_text("basis.m = 7\n", "inline");
    CHECK(c.basis_m == 7);
    CHECK(c.q_flow == 9.0 / 60000.0);
    CHECK(c.k_mt == 5.6142e-8 / 60.0);
    CHECK(c.battery.v_res == 17.6e-3);
    CHECK(c.synthesis.q_min == 8.1 / 60000.0);
    CHECK(c.synthesis.q_max == 9.9 / 60000.0);
    CHECK(c.sigma == 0.1);
    CHECK(c.observer_dt == 1.0);
    CHECK(c.lambda_inv_scalar == 4.798e-7);
    CHECK(c.trace_seed == 1);
    CHECK_FALSE(c.bounds_gamma_theta.has_value());
}

TEST_CASE("config unit conversions") {
    const RunConfig c = parse_config_text(
        "basis.m = 5\n"
        "battery.v_res_ml = 20.0\n"
        "battery.v_cell_ml = 0.5\n"
        "flow.q_ml_min = 12.0\n"
        "crossover.k_mt_l_min = 6.0e-8\n"
        "synthesis.q_min_ml_min = 10.0\n"
        "synthesis.q_max_ml_min = 14.0\n",
        "inline");
    CHECK(c.battery.v_res == doctest::Approx(0.020).epsilon(1e-15));
    CHECK(c.battery.v_cell == doctest::Approx(0.5e-3).epsilon(1e-15));
    CHECK(c.q_flow == 12.0 / 60000.0);
    CHECK(c.k_mt == 6.0e-8 / 60.0);
    CHECK(c.synthesis.q_min == 10.0 / 60000.0);
    CHECK(c.synthesis.q_max == 14.0 / 60000.0);
}

TEST_CASE("config comments whitespace and crlf") {
    const RunConfig c = parse_config_text(
        "# top comment\r\n"
        "\r\n"
        "  basis.m   =  3   # trailing note\r\n"
        "observer.sigma = 0.25\r\n",
        "inline");
    CHECK(c.basis_m == 3);
    CHECK(c.sigma == 0.25);
}

TEST_CASE("config errors carry key and line context") {
    std::string msg =
        thrown_message([] { parse_config_text("basis.m = 7\nbogus.key = 1\n", "f.cfg"); });
    CHECK(msg.find("unknown key 'bogus.key'") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);

    msg = thrown_message([] { parse_config_text("flow.q_ml_min = 9\n", "f.cfg"); });
    CHECK(msg.find("missing required key 'basis.m'") != std::string::npos);

    msg = thrown_message([] { parse_config_text("basis.m = 7\nobserver.sigma = abc\n", "f.cfg"); });
    CHECK(msg.find("cannot parse value for observer.sigma") != std::string::npos);

    msg = thrown_message([] { parse_config_text("basis.m = 7\nno equals here\n", "f.cfg"); });
    CHECK(msg.find("expected key = value") != std::string::npos);

    CHECK_THROWS_AS(parse_config_text("basis.m = 0\n", "f.cfg"), config_error);
    CHECK_THROWS_AS(parse_config_text("basis.m = 7\nsim.dt_s = -1\n", "f.cfg"), config_error);
    CHECK_THROWS_AS(load_config("/tmp/drfb_no_such_file.cfg"), config_error);
}

TEST_CASE("config factories") {
    RunConfig c = parse_config_text("basis.m = 4\nobserver.lambda_inv = 2.0\n", "inline");
    const RbfBasis b = c.make_basis();
    CHECK(b.m() == 4);
    CHECK(b.centers(0) == 0.05);
    CHECK(b.centers(3) == 0.95);

    const Eigen::MatrixXd li = c.make_lambda_inv();
    CHECK(li.rows() == 4);
    CHECK(li(0, 0) == 2.0);
    CHECK(li(0, 1) == 0.0);

    // matrix file override
    const std::string path = "/tmp/drfb_test_lambda.txt";
    {
        std::ofstream out(path);
        out << "1 0 0 0\n0 2 0 0\n0 0 3 0\n0 0 0 4\n";
    }
    c.lambda_inv_file = path;
    const Eigen::MatrixXd lf = c.make_lambda_inv();
    CHECK(lf(2, 2) == 3.0);
    std::remove(path.c_str());

    c.lambda_inv_file = "/tmp/drfb_missing_lambda.txt";
    CHECK_THROWS_AS(c.make_lambda_inv(), config_error);
}

TEST_CASE("assumption overrides replace the calibrated defaults") {
    RunConfig c = parse_config_text("basis.m = 7\n", "inline");
    const RbfBasis b = c.make_basis();

    const BoundAssumptions calibrated = c.make_assumptions(b);
    CHECK(calibrated.gamma_theta > 0.0);
    CHECK(calibrated.eps_bar > 0.0);
    CHECK(calibrated.w_bar == 1e-3);

    c.bounds_gamma_theta = 0.5;
    c.bounds_eps_bar = 0.01;
    c.bounds_w_bar = 2e-3;
    c.bounds_rho = 0.25;
    const BoundAssumptions forced = c.make_assumptions(b);
    CHECK(forced.gamma_theta == 0.5);
    CHECK(forced.eps_bar == 0.01);
    CHECK(forced.w_bar == 2e-3);
    CHECK(forced.rho == 0.25);

    // one override keeps the calibrated partner
    RunConfig half = parse_config_text("basis.m = 7\nbounds.gamma_theta = 0.5\n", "inline");
    const BoundAssumptions mixed = half.make_assumptions(b);
    CHECK(mixed.gamma_theta == 0.5);
    CHECK(mixed.eps_bar == calibrated.eps_bar);
}

TEST_CASE("gains json round trip") {
    const GainSolution g = sample_gains();
    const std::string path = "/tmp/drfb_test_gains.json";
    save_gains(g, path);

    const nlohmann::json j = nlohmann::json::parse(slurp(path));
    CHECK(j.size() == 9);
    for (const char* f : {"p", "z", "l", "f", "w", "alpha_bar", "gamma_z", "gamma_f", "margins"})
        CHECK(j.contains(f));

    const GainSolution back = load_gains(path);
    CHECK((back.p_mat - g.p_mat).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.z_vec - g.z_vec).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.l_gain - g.l_gain).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.f_scalar == g.f_scalar);
    CHECK((back.w_mat - g.w_mat).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.alpha_bar == g.alpha_bar);
    CHECK(back.gamma_z == g.gamma_z);
    CHECK(back.gamma_f == g.gamma_f);
    CHECK(back.margins == g.margins);
    std::remove(path.c_str());
}

TEST_CASE("gains loader rejects missing fields") {
    const std::string path = "/tmp/drfb_test_gains_bad.json";
    {
        std::ofstream out(path);
        out << "{\"p\": [[1,0],[0,1]], \"z\": [0,0]}\n";
    }
    const std::string msg = thrown_message([&] { load_gains(path); });
    CHECK(msg.find("missing field l") != std::string::npos);
    std::remove(path.c_str());

    {
        std::ofstream out(path);
        out << "not json\n";
    }
    CHECK_THROWS_AS(load_gains(path), validation_error);
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_gains("/tmp/drfb_no_such_gains.json"), config_error);
}

TEST_CASE("bounds json uses null markers without leakage") {
    BoundReport rep;
    rep.gamma_psi = 1.0;
    rep.gamma_psi_tilde = 6.45;
    rep.gamma_e = 16465.0;
    rep.gamma_c = 1.0;
    rep.gamma_f = 1.73;
    rep.gamma_w = 1e-6;
    rep.gamma = 0.02;
    rep.gamma_max_admissible = 0.0076;
    rep.gamma_compatible = false;
    rep.delta_bar = 3.1e-7;

    nlohmann::json j = nlohmann::json::parse(bounds_to_json(rep));
    CHECK(j.size() == 14);
    CHECK(j["gamma1"].is_null());
    CHECK(j["gamma2"].is_null());
    CHECK(j["r_x_tilde"].is_null());
    CHECK(j["r_theta_tilde"].is_null());
    CHECK(j["gamma_compatible"].is_boolean());
    CHECK(j["delta_bar"].get<double>() == 3.1e-7);

    rep.gamma1 = 0.1;
    rep.gamma2 = 0.2;
    rep.r_x_tilde = 2498.0;
    rep.r_theta_tilde = 0.3;
    j = nlohmann::json::parse(bounds_to_json(rep));
    CHECK(j["gamma1"].get<double>() == 0.1);
    CHECK(j["r_x_tilde"].get<double>() == 2498.0);

    const std::string path = "/tmp/drfb_test_bounds.json";
    save_bounds(rep, path);
    CHECK(nlohmann::json::parse(slurp(path)) == j);
    std::remove(path.c_str());
}

TEST_CASE("svg writer emits a fixed-size stacked chart") {
    SvgPanel p1;
    p1.title = "voltage";
    SvgSeries s1;
    s1.label = "measured";
    for (int i = 0; i < 10000; ++i) {
        s1.x.push_back(i);
        s1.y.push_back(std::sin(0.01 * i));
    }
    p1.series.push_back(s1);

    SvgPanel p2;
    p2.title = "innovation";
    SvgSeries s2;
    s2.label = "y_tilde";
    s2.x = {0.0, 1.0, 2.0};
    s2.y = {0.1, -0.1, 0.05};
    p2.series.push_back(s2);

    const std::string path = "/tmp/drfb_test_chart.svg";
    write_svg({p1, p2}, path);
    const std::string body = slurp(path);
    CHECK(body.find("<svg") != std::string::npos);
    CHECK(body.find("</svg>") != std::string::npos);
    CHECK(body.find("viewBox=\"0 0 800 500\"") != std::string::npos);
    CHECK(body.find("voltage") != std::string::npos);
    CHECK(body.find("innovation") != std::string::npos);
    CHECK(body.find("y_tilde") != std::string::npos);
    CHECK(body.find("polyline") != std::string::npos);
    // 10000 points get thinned to about 2000 vertices (one comma each)
    const std::size_t first_line = body.find("points=\"");
    REQUIRE(first_line != std::string::npos);
    const std::size_t end = body.find('"', first_line + 8);
    std::size_t commas = 0;
    for (std::size_t i = first_line; i < end; ++i) commas += body[i] == ',';
    CHECK(commas <= 2001);
    CHECK(commas >= 1000);
    std::remove(path.c_str());
}
