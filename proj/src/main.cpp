#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drfb/bounds.hpp"
#include "drfb/config.hpp"
#include "drfb/errors.hpp"
#include "drfb/jsonio.hpp"
#include "drfb/observer.hpp"
#include "drfb/sdp.hpp"
#include "drfb/svg.hpp"
#include "drfb/telemetry.hpp"

namespace {

using namespace drfb;

std::string bounds_sibling_path(const std::string& out) {
    const std::string suffix = ".json";
    if (out.size() > suffix.size() &&
        out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0)
        return out.substr(0, out.size() - suffix.size()) + ".bounds.json";
    return out + ".bounds.json";
}

int cmd_synthesize(const std::string& config_path, const std::string& out_path) {
    const RunConfig cfg = load_config(config_path);
    const RbfBasis basis = cfg.make_basis();
    const ModelMatrices m = assemble_matrices(cfg.battery);
    const GainSolution sol = synthesize(cfg.synthesis, m);
    save_gains(sol, out_path);

    const BoundAssumptions assume = cfg.make_assumptions(basis);
    const BoundReport rep = make_bound_report(assume, sol, m, basis,
                                              cfg.synthesis.beta, cfg.sigma);
    const std::string bounds_path = bounds_sibling_path(out_path);
    save_bounds(rep, bounds_path);

    double min_margin = sol.margins.empty() ? 0.0 : sol.margins[0];
    for (double v : sol.margins) min_margin = std::min(min_margin, v);
    std::printf("synthesis ok: objective %.9g, min margin %.3g, L = [%.9g, %.9g]\n",
                sol.objective, min_margin, sol.l_gain[0], sol.l_gain[1]);
    std::printf("wrote %s and %s\n", out_path.c_str(), bounds_path.c_str());
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& mode,
                 const std::string& out_path, const std::string& trace_out,
                 long long seed_override) {
    if (mode != "linear" && mode != "zero")
        throw config_error("simulate: --mode must be linear or zero");
    if (out_path.empty() && trace_out.empty())
        throw config_error("simulate: need --out or --trace-out");
    const RunConfig cfg = load_config(config_path);
    const ModelMatrices m = assemble_matrices(cfg.battery);

    if (!out_path.empty()) {
        const LinearCrossover lc{cfg.k_mt};
        FluxFn flux_fn;
        if (mode == "linear")
            flux_fn = [&](double s) { return linear_crossover_flux(lc, cfg.battery, s); };
        else
            flux_fn = [](double) { return 0.0; };
        const SimResult sim =
            simulate(cfg.battery, m, flux_fn,
                     InputSeries::constant(cfg.sim_current, cfg.q_flow), cfg.sim_x0,
                     cfg.sim_dt, cfg.sim_t_end, cfg.sim_record_stride);
        std::ofstream out(out_path);
        if (!out) throw config_error("simulate: cannot write " + out_path);
        out << "t_s,soc,soc_cell,voltage_V,qx_mol_s\n";
        char buf[192];
        for (const auto& r : sim.rows) {
            std::snprintf(buf, sizeof buf, "%.15g,%.15g,%.15g,%.15g,%.15g\n", r.t,
                          r.x.soc, r.x.soc_cell, r.voltage, r.q_x);
            out << buf;
        }
        if (!out) throw config_error("simulate: write failed for " + out_path);
        std::printf("simulate ok: %zu rows, transferred %.6g mol, wrote %s\n",
                    sim.rows.size(), sim.transferred_mol, out_path.c_str());
    }

    if (!trace_out.empty()) {
        const std::uint64_t seed =
            seed_override >= 0 ? static_cast<std::uint64_t>(seed_override)
                               : cfg.trace_seed;
        const TelemetryTrace trace =
            synthesize_trace(cfg.battery, cfg.k_mt, cfg.trace_x0, cfg.trace_dt,
                             cfg.trace_t_end, cfg.trace_noise_w, seed, cfg.q_flow);
        write_csv(trace, trace_out);
        std::printf("trace ok: %zu samples, wrote %s\n", trace.samples.size(),
                    trace_out.c_str());
    }
    return 0;
}

int cmd_observe(const std::string& config_path, const std::string& gains_path,
                const std::string& trace_path, const std::string& out_path,
                const std::string& svg_path, double dt_override) {
    const RunConfig cfg = load_config(config_path);
    const RbfBasis basis = cfg.make_basis();
    const ModelMatrices m = assemble_matrices(cfg.battery);
    const GainSolution gains = load_gains(gains_path);

    ObserverConfig oc;
    oc.gain_l = gains.l_gain;
    oc.f_scalar = gains.f_scalar;
    oc.lambda_inv = cfg.make_lambda_inv();
    oc.sigma = cfg.sigma;
    oc.dt = dt_override > 0.0 ? dt_override : cfg.observer_dt;
    oc.record_stride = cfg.record_stride;

    const TelemetryTrace raw = load_csv(trace_path);
    const TelemetryTrace trace = resample(raw, oc.dt);

    ObserverState init;
    init.x_hat = cfg.observer_x0;
    init.theta_hat =
        Eigen::VectorXd::Constant(basis.m(), cfg.observer_theta0_fill);

    const std::vector<EstimateRecord> records =
        drfb::run(oc, cfg.battery, m, basis, trace, init);

    std::ofstream out(out_path);
    if (!out) throw config_error("observe: cannot write " + out_path);
    out << "t_s,soc_hat,soc_cell_hat,y_tilde,qx_hat_mol_s";
    for (int i = 1; i <= basis.m(); ++i) out << ",theta_" << i;
    out << "\n";
    char buf[64];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.15g", r.t);
        out << buf;
        const double cols[4] = {r.x_hat.soc, r.x_hat.soc_cell, r.y_tilde, r.q_x_hat};
        for (double v : cols) {
            std::snprintf(buf, sizeof buf, ",%.15g", v);
            out << buf;
        }
        for (int i = 0; i < r.theta_hat.size(); ++i) {
            std::snprintf(buf, sizeof buf, ",%.15g", r.theta_hat[i]);
            out << buf;
        }
        out << "\n";
    }
    if (!out) throw config_error("observe: write failed for " + out_path);

    if (!records.empty()) {
        std::vector<double> s_path;
        s_path.reserve(records.size());
        for (const auto& r : records)
            s_path.push_back(std::min(1.2, std::max(-0.2, r.x_hat.soc_cell)));
        const double dt_rec =
            oc.dt * static_cast<double>(oc.record_stride == 0 ? 1 : oc.record_stride);
        const Eigen::MatrixXd gram = excitation_gram(basis, s_path, dt_rec);
        const double lo = min_eig(gram);
        const double hi = -min_eig(Eigen::MatrixXd(-gram));
        std::printf("excitation gram eigenvalues: min %.6g, max %.6g\n", lo, hi);
    }
    std::printf("observe ok: %zu records, wrote %s\n", records.size(),
                out_path.c_str());

    if (!svg_path.empty() && !records.empty()) {
        SvgPanel p_soc{"SOC estimates vs t [s]", {}};
        SvgSeries soc{"soc_hat", {}, {}}, soc_cell{"soc_cell_hat", {}, {}};
        for (const auto& r : records) {
            soc.x.push_back(r.t);
            soc.y.push_back(r.x_hat.soc);
            soc_cell.x.push_back(r.t);
            soc_cell.y.push_back(r.x_hat.soc_cell);
        }
        p_soc.series = {soc, soc_cell};

        SvgPanel p_flux{"crossover flux estimate vs SOC_cell estimate", {}};
        SvgSeries fl{"qx_hat", {}, {}};
        for (const auto& r : records) {
            fl.x.push_back(r.x_hat.soc_cell);
            fl.y.push_back(r.q_x_hat);
        }
        p_flux.series = {fl};

        SvgPanel p_theta{"adaptive weights vs t [s]", {}};
        for (int i = 0; i < basis.m(); ++i) {
            SvgSeries th{"theta_" + std::to_string(i + 1), {}, {}};
            for (const auto& r : records) {
                th.x.push_back(r.t);
                th.y.push_back(r.theta_hat[i]);
            }
            p_theta.series.push_back(std::move(th));
        }
        write_svg({p_soc, p_flux, p_theta}, svg_path);
        std::printf("wrote %s\n", svg_path.c_str());
    }
    return 0;
}

int cmd_bounds(const std::string& config_path, const std::string& gains_path) {
    const RunConfig cfg = load_config(config_path);
    const RbfBasis basis = cfg.make_basis();
    const ModelMatrices m = assemble_matrices(cfg.battery);
    const GainSolution gains = load_gains(gains_path);
    const BoundAssumptions assume = cfg.make_assumptions(basis);
    const BoundReport rep = make_bound_report(assume, gains, m, basis,
                                              cfg.synthesis.beta, cfg.sigma);
    std::cout << bounds_to_json(rep);
    if (!rep.gamma_compatible)
        std::cerr << "warning: gamma " << rep.gamma
                  << " exceeds the admissible sqrt(beta/alpha_bar) "
                  << rep.gamma_max_admissible << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"disproportionation flow-battery state and flux observer"};
    app.require_subcommand(1);

    std::string config_path, out_path, gains_path, trace_path, svg_path,
        trace_out, mode = "linear";
    long long seed_override = -1;
    double dt_override = 0.0;

    auto* syn = app.add_subcommand("synthesize", "solve for certified observer gains");
    syn->add_option("--config", config_path, "config file")->required();
    syn->add_option("--out", out_path, "gains JSON output path")->required();

    auto* sim = app.add_subcommand("simulate", "forward-simulate the cell model");
    sim->add_option("--config", config_path, "config file")->required();
    sim->add_option("--mode", mode, "crossover mode: linear or zero");
    sim->add_option("--out", out_path, "state CSV output path");
    sim->add_option("--trace-out", trace_out, "synthetic telemetry CSV output path");
    sim->add_option("--seed", seed_override, "noise seed override");

    auto* obs = app.add_subcommand("observe", "run the adaptive observer on telemetry");
    obs->add_option("--config", config_path, "config file")->required();
    obs->add_option("--gains", gains_path, "gains JSON from synthesize")->required();
    obs->add_option("--trace", trace_path, "telemetry CSV")->required();
    obs->add_option("--out", out_path, "estimate CSV output path")->required();
    obs->add_option("--svg", svg_path, "optional chart output path");
    obs->add_option("--dt", dt_override, "observer step override [s]");

    auto* bnd = app.add_subcommand("bounds", "print the error-bound report");
    bnd->add_option("--config", config_path, "config file")->required();
    bnd->add_option("--gains", gains_path, "gains JSON from synthesize")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (syn->parsed()) return cmd_synthesize(config_path, out_path);
        if (sim->parsed())
            return cmd_simulate(config_path, mode, out_path, trace_out, seed_override);
        if (obs->parsed())
            return cmd_observe(config_path, gains_path, trace_path, out_path,
                               svg_path, dt_override);
        if (bnd->parsed()) return cmd_bounds(config_path, gains_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 1;
}
