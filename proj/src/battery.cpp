#include "drfb/battery.hpp"

#include <cmath>
#include <sstream>

#include "drfb/errors.hpp"

namespace drfb {

void BatteryParams::validate() const {
    auto bad = [](const char* name) {
        throw validation_error(std::string("battery parameter invalid: ") + name);
    };
    if (!(v_res > 0.0)) bad("v_res");
    if (!(v_cell > 0.0)) bad("v_cell");
    if (!(c0 > 0.0)) bad("c0");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) bad("epsilon");
    if (!(e0_cell > 0.0)) bad("e0_cell");
    if (!(temperature > 0.0)) bad("temperature");
    if (!(faraday > 0.0)) bad("faraday");
    if (!(gas_constant > 0.0)) bad("gas_constant");
    if (!(v_cell < v_res)) bad("v_cell >= v_res");
}

ModelMatrices assemble_matrices(const BatteryParams& p) {
    p.validate();
    ModelMatrices m;
    m.a21_per_flow = 1.0 / (p.epsilon * p.v_cell);
    m.e << -1.0 / (p.c0 * p.v_res), -1.0 / (p.epsilon * p.c0 * p.v_cell);
    m.b = m.e / p.faraday;
    return m;
}

Eigen::Vector2d dynamics(const ModelMatrices& m, const StateVector& x,
                         double q_flow, double current, double q_x) {
    if (!(q_flow > 0.0)) throw validation_error("dynamics: q_flow must be positive");
    const double a = m.a21_per_flow * q_flow;
    Eigen::Vector2d dx;
    dx[0] = m.e[0] * q_x + m.b[0] * current;
    dx[1] = a * (x.soc - x.soc_cell) + m.e[1] * q_x + m.b[1] * current;
    return dx;
}

double nernst_output(const BatteryParams& p, const StateVector& x, double current) {
    if (current != 0.0)
        throw validation_error("nernst_output: nonzero current unsupported (open-circuit model only)");
    const double s = x.soc_cell;
    if (!(s > 0.0 && s < 1.0)) {
        std::ostringstream os;
        os << "nernst_output: soc_cell " << s << " outside (0,1)";
        throw validation_error(os.str());
    }
    return p.e0_cell + p.nernst_slope() * std::log(s / (1.0 - s));
}

double invert_output(const BatteryParams& p, double v_out, double current,
                     bool* saturated) {
    if (current != 0.0)
        throw validation_error("invert_output: nonzero current unsupported (open-circuit model only)");
    const double z = (v_out - p.e0_cell) / p.nernst_slope();
    // logistic, evaluated in the numerically stable branch
    double s;
    if (z >= 0.0) {
        s = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double ez = std::exp(z);
        s = ez / (1.0 + ez);
    }
    if (saturated) *saturated = (s < 1e-6 || s > 1.0 - 1e-6);
    return s;
}

double linear_crossover_flux(const LinearCrossover& lc, const BatteryParams& p,
                             double soc_cell) {
    if (!(soc_cell >= 0.0 && soc_cell <= 1.0)) {
        std::ostringstream os;
        os << "linear_crossover_flux: soc_cell " << soc_cell << " outside [0,1]";
        throw validation_error(os.str());
    }
    return lc.k_mt * p.c0 * soc_cell;
}

std::size_t InputSeries::segment(double tt, std::size_t hint) const {
    std::size_t i = hint < t.size() ? hint : 0;
    while (i + 1 < t.size() && t[i + 1] <= tt) ++i;
    return i;
}

SimResult simulate(const BatteryParams& p, const ModelMatrices& m,
                   const FluxFn& crossover, const InputSeries& inputs,
                   StateVector x0, double dt, double t_end,
                   std::size_t record_stride) {
    p.validate();
    if (!(dt > 0.0)) throw validation_error("simulate: dt must be positive");
    if (inputs.t.empty() || inputs.t.size() != inputs.current.size() ||
        inputs.t.size() != inputs.flow.size())
        throw validation_error("simulate: malformed input series");
    if (record_stride == 0) record_stride = 1;

    double q_max = 0.0;
    for (double q : inputs.flow) {
        if (!(q > 0.0)) throw validation_error("simulate: flow must be positive");
        q_max = std::max(q_max, q);
    }
    if (!(dt * m.a21_per_flow * q_max < 0.5))
        throw validation_error("simulate: dt too large for the cell mixing rate (dt*A21 >= 0.5)");

    const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    SimResult out;
    out.rows.reserve(n_steps / record_stride + 2);

    // state y = [soc, soc_cell, transferred mol]; the third component
    // integrates q_x + i/F with the same RK4 stages as the states so the
    // mass audit closes to rounding error
    double y0 = x0.soc, y1 = x0.soc_cell, y2 = 0.0;
    std::size_t seg = 0;

    auto rhs = [&](double a, double i_now, double s0, double s1,
                   double& d0, double& d1, double& d2) {
        const double qx = crossover(std::min(1.0, std::max(0.0, s1)));
        d0 = m.e[0] * qx + m.b[0] * i_now;
        d1 = a * (s0 - s1) + m.e[1] * qx + m.b[1] * i_now;
        d2 = qx + i_now / p.faraday;
    };

    auto record = [&](double t) {
        const StateVector x{y0, y1};
        const double v = nernst_output(p, x, 0.0);
        out.rows.push_back(SimRow{t, x, v, crossover(std::min(1.0, std::max(0.0, y1)))});
    };

    record(0.0);
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        seg = inputs.segment(t, seg);
        const double a = m.a21_per_flow * inputs.flow[seg];
        const double i_now = inputs.current[seg];

        double k10, k11, k12, k20, k21, k22, k30, k31, k32, k40, k41, k42;
        rhs(a, i_now, y0, y1, k10, k11, k12);
        rhs(a, i_now, y0 + 0.5 * dt * k10, y1 + 0.5 * dt * k11, k20, k21, k22);
        rhs(a, i_now, y0 + 0.5 * dt * k20, y1 + 0.5 * dt * k21, k30, k31, k32);
        rhs(a, i_now, y0 + dt * k30, y1 + dt * k31, k40, k41, k42);
        y0 += dt / 6.0 * (k10 + 2.0 * k20 + 2.0 * k30 + k40);
        y1 += dt / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41);
        y2 += dt / 6.0 * (k12 + 2.0 * k22 + 2.0 * k32 + k42);

        if (y0 < -0.05 || y0 > 1.05 || y1 < -0.05 || y1 > 1.05) {
            std::ostringstream os;
            os << "simulate: state left [-0.05,1.05] at t=" << t + dt;
            throw divergence_error(os.str());
        }
        if ((k + 1) % record_stride == 0 || k + 1 == n_steps) record(t + dt);
    }
    out.transferred_mol = y2;
    return out;
}

} // namespace drfb
