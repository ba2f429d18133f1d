#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace drfb {

// Physical constants and cell geometry. Internal unit system is SI:
// seconds, liters, mol, amps, volts, kelvin. Anything quoted in minutes
// or milliliters is converted before it lands here.
struct BatteryParams {
    double v_res = 17.6e-3;        // reservoir volume [L]
    double v_cell = 0.6985e-3;     // half-cell reactor volume [L]
    double c0 = 0.1;               // total active-species concentration [mol/L]
    double epsilon = 0.87;         // electrode porosity
    double e0_cell = 2.2;          // equilibrium cell potential [V]
    double temperature = 275.0;    // [K]
    double faraday = 96485.0;      // [C/mol]
    double gas_constant = 8.314;   // [J/(mol K)]

    void validate() const;
    // slope of the open-circuit voltage map, 2RT/F [V]
    double nernst_slope() const { return 2.0 * gas_constant * temperature / faraday; }
};

// State-space matrices of the two-state model
//   d/dt [soc, soc_cell] = A(q) x + E q_x + B i
// A(q) = [[0, 0], [q/(eps v_cell), -q/(eps v_cell)]], output row C = [0, 1].
struct ModelMatrices {
    double a21_per_flow = 0.0;     // 1/(eps v_cell) [1/L]; A21 = a21_per_flow * q [1/s]
    Eigen::Vector2d e;             // flux injection, both entries < 0
    Eigen::Vector2d b;             // current injection, e / F

    Eigen::Matrix2d a_of(double q_flow) const {
        const double a = a21_per_flow * q_flow;
        Eigen::Matrix2d m;
        m << 0.0, 0.0, a, -a;
        return m;
    }
    static Eigen::RowVector2d c_row() { return {0.0, 1.0}; }
};

struct StateVector {
    double soc = 0.0;
    double soc_cell = 0.0;
};

// Linear crossover baseline q_x = k_mt c0 soc_cell.
struct LinearCrossover {
    double k_mt = 0.0;             // mass-transfer coefficient [L/s]
};

ModelMatrices assemble_matrices(const BatteryParams& p);

Eigen::Vector2d dynamics(const ModelMatrices& m, const StateVector& x,
                         double q_flow, double current, double q_x);

// Open-circuit Nernst map, only valid at zero current (no overpotential model).
double nernst_output(const BatteryParams& p, const StateVector& x, double current);

// Logistic inverse of the Nernst map. Total on all voltages; sets *saturated
// when the result is within 1e-6 of 0 or 1.
double invert_output(const BatteryParams& p, double v_out, double current,
                     bool* saturated = nullptr);

double linear_crossover_flux(const LinearCrossover& lc, const BatteryParams& p,
                             double soc_cell);

// Piecewise-constant actuator inputs, held between breakpoints.
struct InputSeries {
    std::vector<double> t;
    std::vector<double> current;   // [A]
    std::vector<double> flow;      // [L/s]

    static InputSeries constant(double current, double flow) {
        return InputSeries{{0.0}, {current}, {flow}};
    }
    // index of the breakpoint active at time tt (zero-order hold)
    std::size_t segment(double tt, std::size_t hint = 0) const;
};

struct SimRow {
    double t;
    StateVector x;
    double voltage;
    double q_x;
};

struct SimResult {
    std::vector<SimRow> rows;
    // RK4 quadrature of q_x + i/F along the trajectory, for mass bookkeeping
    double transferred_mol = 0.0;
};

using FluxFn = std::function<double(double /*soc_cell*/)>;

// Fixed-step RK4 forward simulation. Throws when a state leaves [-0.05, 1.05].
SimResult simulate(const BatteryParams& p, const ModelMatrices& m,
                   const FluxFn& crossover, const InputSeries& inputs,
                   StateVector x0, double dt, double t_end,
                   std::size_t record_stride = 1);

} // namespace drfb
