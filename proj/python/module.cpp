#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "drfb/basis.hpp"
#include "drfb/battery.hpp"
#include "drfb/bounds.hpp"
#include "drfb/synthesis.hpp"
#include "drfb/telemetry.hpp"

namespace py = pybind11;
using namespace drfb;

namespace {

VarianceConvention convention_from(const std::string& name) {
    if (name == "half") return VarianceConvention::half;
    if (name == "plain") return VarianceConvention::plain;
    throw py::value_error("variance convention must be 'half' or 'plain'");
}

py::dict report_to_dict(const BoundReport& r) {
    py::dict d;
    d["gamma_psi"] = r.gamma_psi;
    d["gamma_psi_tilde"] = r.gamma_psi_tilde;
    d["gamma_e"] = r.gamma_e;
    d["gamma_c"] = r.gamma_c;
    d["gamma_f"] = r.gamma_f;
    d["gamma_w"] = r.gamma_w;
    d["gamma"] = r.gamma;
    d["gamma_max_admissible"] = r.gamma_max_admissible;
    d["gamma_compatible"] = r.gamma_compatible;
    d["delta_bar"] = r.delta_bar;
    auto opt = [](const std::optional<double>& v) {
        return v ? py::cast(*v) : py::none().cast<py::object>();
    };
    d["gamma1"] = opt(r.gamma1);
    d["gamma2"] = opt(r.gamma2);
    d["r_x_tilde"] = opt(r.r_x_tilde);
    d["r_theta_tilde"] = opt(r.r_theta_tilde);
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "flow-battery crossover observer core";

    py::class_<BatteryParams>(m, "BatteryParams")
        .def(py::init<>())
        .def_readwrite("v_res", &BatteryParams::v_res)
        .def_readwrite("v_cell", &BatteryParams::v_cell)
        .def_readwrite("c0", &BatteryParams::c0)
        .def_readwrite("epsilon", &BatteryParams::epsilon)
        .def_readwrite("e0_cell", &BatteryParams::e0_cell)
        .def_readwrite("temperature", &BatteryParams::temperature)
        .def_readwrite("faraday", &BatteryParams::faraday)
        .def_readwrite("gas_constant", &BatteryParams::gas_constant)
        .def("nernst_slope", &BatteryParams::nernst_slope)
        .def("validate", &BatteryParams::validate);

    m.def("nernst", [](const BatteryParams& p, double soc_cell) {
        return nernst_output(p, StateVector{soc_cell, soc_cell}, 0.0);
    });
    m.def("invert", [](const BatteryParams& p, double voltage) {
        return invert_output(p, voltage, 0.0);
    });

    py::class_<RbfBasis>(m, "RbfBasis")
        .def_readonly("centers", &RbfBasis::centers)
        .def_readonly("variance", &RbfBasis::variance)
        .def_property_readonly("m", &RbfBasis::m);

    m.def(
        "uniform_basis",
        [](int m_, double lo, double hi, double variance, const std::string& conv) {
            return RbfBasis::uniform(m_, lo, hi, variance, convention_from(conv));
        },
        py::arg("m"), py::arg("lo") = 0.05, py::arg("hi") = 0.95,
        py::arg("variance") = 0.0081, py::arg("convention") = "half");
    m.def("evaluate_basis",
          [](const RbfBasis& b, double s) { return evaluate(b, s); });
    m.def("lipschitz_bound",
          [](const RbfBasis& b) { return lipschitz_bound(b); });
    m.def("basis_flux", [](const RbfBasis& b, const Eigen::VectorXd& theta,
                           double s) { return flux(b, theta, s); });
    m.def("fit_basis",
          [](const RbfBasis& b, const Eigen::VectorXd& xs,
             const Eigen::VectorXd& ys) { return least_squares_fit(b, xs, ys); });

    py::class_<GainSolution>(m, "GainSolution")
        .def_readonly("p", &GainSolution::p_mat)
        .def_readonly("z", &GainSolution::z_vec)
        .def_readonly("l", &GainSolution::l_gain)
        .def_readonly("f", &GainSolution::f_scalar)
        .def_readonly("w", &GainSolution::w_mat)
        .def_readonly("alpha_bar", &GainSolution::alpha_bar)
        .def_readonly("gamma_z", &GainSolution::gamma_z)
        .def_readonly("gamma_f", &GainSolution::gamma_f)
        .def_readonly("margins", &GainSolution::margins)
        .def_readonly("objective", &GainSolution::objective);

    m.def(
        "synthesize_gains",
        [](const BatteryParams& p, double q_min, double q_max, double beta,
           double kappa_z, double kappa_f, double tol) {
            SynthesisConfig cfg;
            cfg.q_min = q_min;
            cfg.q_max = q_max;
            cfg.beta = beta;
            cfg.kappa_z = kappa_z;
            cfg.kappa_f = kappa_f;
            cfg.tol = tol;
            return synthesize(cfg, assemble_matrices(p));
        },
        py::arg("params"), py::arg("q_min"), py::arg("q_max"),
        py::arg("beta") = 1e-4, py::arg("kappa_z") = 1.0,
        py::arg("kappa_f") = 1e-5, py::arg("tol") = 1e-8);

    m.def(
        "bound_report",
        [](const BatteryParams& p, double k_mt, const RbfBasis& b,
           const GainSolution& sol, double beta, double sigma) {
            const BoundAssumptions a = default_assumptions(p, k_mt, b);
            return report_to_dict(
                make_bound_report(a, sol, assemble_matrices(p), b, beta, sigma));
        },
        py::arg("params"), py::arg("k_mt"), py::arg("basis"), py::arg("gains"),
        py::arg("beta") = 1e-4, py::arg("sigma") = 0.1);

    m.def(
        "synthesize_trace",
        [](const BatteryParams& p, double k_mt, double x0_soc, double x0_soc_cell,
           double dt, double t_end, double noise_w, std::uint64_t seed,
           double q_flow) {
            const TelemetryTrace tr = drfb::synthesize_trace(
                p, k_mt, StateVector{x0_soc, x0_soc_cell}, dt, t_end, noise_w,
                seed, q_flow);
            const auto n = static_cast<Eigen::Index>(tr.samples.size());
            Eigen::VectorXd t(n), v(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                t[i] = tr.samples[static_cast<std::size_t>(i)].t;
                v[i] = tr.samples[static_cast<std::size_t>(i)].voltage;
            }
            return py::make_tuple(t, v);
        },
        py::arg("params"), py::arg("k_mt"), py::arg("x0_soc"),
        py::arg("x0_soc_cell"), py::arg("dt"), py::arg("t_end"),
        py::arg("noise_w") = 0.0, py::arg("seed") = 1, py::arg("q_flow") = 1.5e-4);

    m.def(
        "simulate",
        [](const BatteryParams& p, double k_mt, double current, double q_flow,
           double x0_soc, double x0_soc_cell, double dt, double t_end,
           std::size_t stride) {
            const ModelMatrices mm = assemble_matrices(p);
            const LinearCrossover lc{k_mt};
            const FluxFn fn = [&](double s) {
                return linear_crossover_flux(lc, p, s);
            };
            const SimResult r =
                simulate(p, mm, fn, InputSeries::constant(current, q_flow),
                         StateVector{x0_soc, x0_soc_cell}, dt, t_end, stride);
            const auto n = static_cast<Eigen::Index>(r.rows.size());
            Eigen::VectorXd t(n), soc(n), soc_cell(n), volt(n), qx(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto& row = r.rows[static_cast<std::size_t>(i)];
                t[i] = row.t;
                soc[i] = row.x.soc;
                soc_cell[i] = row.x.soc_cell;
                volt[i] = row.voltage;
                qx[i] = row.q_x;
            }
            py::dict d;
            d["t"] = t;
            d["soc"] = soc;
            d["soc_cell"] = soc_cell;
            d["voltage"] = volt;
            d["qx"] = qx;
            d["transferred_mol"] = r.transferred_mol;
            return d;
        },
        py::arg("params"), py::arg("k_mt"), py::arg("current") = 0.0,
        py::arg("q_flow") = 1.5e-4, py::arg("x0_soc") = 0.95,
        py::arg("x0_soc_cell") = 0.95, py::arg("dt") = 1.0,
        py::arg("t_end") = 3600.0, py::arg("stride") = 1);
}
