#include "drfb/observer.hpp"

#include <cmath>
#include <sstream>

#include "drfb/errors.hpp"
#include "drfb/sdp.hpp"

namespace drfb {

void ObserverConfig::validate() const {
    if (!gain_l.allFinite() || !std::isfinite(f_scalar))
        throw validation_error("observer: gains must be finite");
    const auto n = lambda_inv.rows();
    if (n < 1 || lambda_inv.cols() != n)
        throw validation_error("observer: lambda_inv must be square");
    if (!lambda_inv.isApprox(lambda_inv.transpose(), 1e-12))
        throw validation_error("observer: lambda_inv must be symmetric");
    if (!(min_eig(lambda_inv) > 0.0))
        throw validation_error("observer: lambda_inv must be positive definite");
    if (sigma < 0.0) throw validation_error("observer: sigma must be >= 0");
    if (!(dt > 0.0)) throw validation_error("observer: dt must be positive");
}

Eigen::VectorXd adaptation(const ObserverConfig& cfg,
                           const Eigen::VectorXd& psi_hat, double y_tilde,
                           const Eigen::VectorXd& theta_hat) {
    if (psi_hat.size() != theta_hat.size() ||
        psi_hat.size() != cfg.lambda_inv.rows())
        throw validation_error("observer: adaptation dimension mismatch");
    return cfg.lambda_inv *
           (psi_hat * (cfg.f_scalar * y_tilde) -
            0.5 * cfg.sigma * std::abs(y_tilde) * theta_hat);
}

namespace {

constexpr double kSClampLo = -0.2, kSClampHi = 1.2;

// Joint RK4 over (x_hat, theta_hat) with preallocated workspace so the
// long-horizon driver loop does not allocate.
struct Stepper {
    const ObserverConfig& cfg;
    const ModelMatrices& m;
    const RbfBasis& basis;
    int n_theta;
    Eigen::VectorXd psi;
    Eigen::VectorXd rhs_buf;
    // stage slopes and the staged state
    Eigen::Vector2d kx[4];
    Eigen::VectorXd kt[4];
    Eigen::VectorXd theta_stage;

    Stepper(const ObserverConfig& c, const ModelMatrices& mm, const RbfBasis& b)
        : cfg(c), m(mm), basis(b), n_theta(b.m()), psi(n_theta),
          rhs_buf(n_theta), theta_stage(n_theta) {
        for (auto& v : kt) v.resize(n_theta);
    }

    void slopes(const Eigen::Vector2d& x, const Eigen::VectorXd& theta, double y,
                double current, double a21, Eigen::Vector2d& dx,
                Eigen::VectorXd& dtheta) {
        const double s_hat =
            std::min(kSClampHi, std::max(kSClampLo, x[1]));
        evaluate_into(basis, s_hat, psi.data());
        const double qx_hat = psi.dot(theta);
        const double y_tilde = y - x[1];
        dx[0] = m.e[0] * qx_hat + m.b[0] * current + cfg.gain_l[0] * y_tilde;
        dx[1] = a21 * (x[0] - x[1]) + m.e[1] * qx_hat + m.b[1] * current +
                cfg.gain_l[1] * y_tilde;
        rhs_buf = psi * (cfg.f_scalar * y_tilde);
        rhs_buf -= (0.5 * cfg.sigma * std::abs(y_tilde)) * theta;
        dtheta.noalias() = cfg.lambda_inv * rhs_buf;
    }

    void advance(Eigen::Vector2d& x, Eigen::VectorXd& theta, double y,
                 double current, double q_flow, double t) {
        if (!(q_flow > 0.0))
            throw validation_error("observer: q_flow must be positive");
        const double a21 = m.a21_per_flow * q_flow;
        const double dt = cfg.dt;

        slopes(x, theta, y, current, a21, kx[0], kt[0]);
        theta_stage = theta + 0.5 * dt * kt[0];
        slopes(x + 0.5 * dt * kx[0], theta_stage, y, current, a21, kx[1], kt[1]);
        theta_stage = theta + 0.5 * dt * kt[1];
        slopes(x + 0.5 * dt * kx[1], theta_stage, y, current, a21, kx[2], kt[2]);
        theta_stage = theta + dt * kt[2];
        slopes(x + dt * kx[2], theta_stage, y, current, a21, kx[3], kt[3]);

        x += dt / 6.0 * (kx[0] + 2.0 * kx[1] + 2.0 * kx[2] + kx[3]);
        theta += dt / 6.0 * (kt[0] + 2.0 * kt[1] + 2.0 * kt[2] + kt[3]);

        if (!(x.norm() <= 10.0) || !theta.allFinite()) {
            std::ostringstream os;
            os << "observer diverged at t=" << t + dt << " (||x_hat||=" << x.norm()
               << ")";
            throw divergence_error(os.str());
        }
    }
};

} // namespace

ObserverState step(const ObserverConfig& cfg, const BatteryParams& p,
                   const ModelMatrices& m, const RbfBasis& basis,
                   const ObserverState& st, double y, double current,
                   double q_flow) {
    cfg.validate();
    p.validate();
    basis.validate();
    if (st.theta_hat.size() != basis.m() ||
        cfg.lambda_inv.rows() != basis.m())
        throw validation_error("observer: theta dimension must match the basis");
    if (!std::isfinite(y) || !std::isfinite(current))
        throw validation_error("observer: inputs must be finite");

    Stepper stepper(cfg, m, basis);
    Eigen::Vector2d x(st.x_hat.soc, st.x_hat.soc_cell);
    Eigen::VectorXd theta = st.theta_hat;
    stepper.advance(x, theta, y, current, q_flow, st.t);
    return ObserverState{StateVector{x[0], x[1]}, std::move(theta), st.t + cfg.dt};
}

std::vector<EstimateRecord> run(const ObserverConfig& cfg,
                                const BatteryParams& p, const ModelMatrices& m,
                                const RbfBasis& basis,
                                const TelemetryTrace& trace,
                                const ObserverState& init) {
    cfg.validate();
    p.validate();
    basis.validate();
    if (init.theta_hat.size() != basis.m() ||
        cfg.lambda_inv.rows() != basis.m())
        throw validation_error("observer: theta dimension must match the basis");
    trace.validate();
    if (trace.samples.empty()) return {};
    if (!(trace.dt_resampled > 0.0) ||
        std::abs(trace.dt_resampled - cfg.dt) > 1e-9 * cfg.dt)
        throw validation_error(
            "observer: trace must be resampled to the observer dt grid");
    for (std::size_t i = 0; i + 1 < trace.samples.size(); ++i) {
        if (trace.samples[i + 1].t - trace.samples[i].t > 10.0 * cfg.dt) {
            std::ostringstream os;
            os << "observer: telemetry gap after t=" << trace.samples[i].t
               << " exceeds 10x dt";
            throw validation_error(os.str());
        }
    }

    const std::size_t stride = cfg.record_stride == 0 ? 1 : cfg.record_stride;
    const std::size_t n = trace.samples.size();

    Stepper stepper(cfg, m, basis);
    Eigen::Vector2d x(init.x_hat.soc, init.x_hat.soc_cell);
    Eigen::VectorXd theta = init.theta_hat;
    Eigen::VectorXd psi(basis.m());

    std::vector<EstimateRecord> records;
    records.reserve(n / stride + 2);
    auto record = [&](double t, double y) {
        EstimateRecord r;
        r.t = t;
        r.x_hat = StateVector{x[0], x[1]};
        r.theta_hat = theta;
        r.y_tilde = y - x[1];
        const double s_hat = std::min(kSClampHi, std::max(kSClampLo, x[1]));
        evaluate_into(basis, s_hat, psi.data());
        r.q_x_hat = psi.dot(theta);
        records.push_back(std::move(r));
    };

    for (std::size_t k = 0; k < n; ++k) {
        const auto& s = trace.samples[k];
        const double y = invert_output(p, s.voltage, 0.0);
        if (k % stride == 0 || k + 1 == n) record(s.t, y);
        if (k + 1 < n) stepper.advance(x, theta, y, s.current, s.flow, s.t);
    }
    return records;
}

} // namespace drfb
