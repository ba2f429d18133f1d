#include "drfb/telemetry.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "drfb/errors.hpp"

namespace drfb {

namespace {

constexpr const char* kHeader = "t_s,voltage_V,current_A,flow_mL_min";
constexpr double kFlowMlMinPerLs = 60000.0; // mL/min per L/s

double median_spacing(const std::vector<TelemetrySample>& s) {
    if (s.size() < 2) return 0.0;
    std::vector<double> gaps(s.size() - 1);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) gaps[i] = s[i + 1].t - s[i].t;
    std::sort(gaps.begin(), gaps.end());
    const std::size_t n = gaps.size();
    return n % 2 ? gaps[n / 2] : 0.5 * (gaps[n / 2 - 1] + gaps[n / 2]);
}

} // namespace

void TelemetryTrace::validate() const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!std::isfinite(s.t) || !std::isfinite(s.voltage) ||
            !std::isfinite(s.current) || !std::isfinite(s.flow)) {
            std::ostringstream os;
            os << "telemetry: non-finite value in row " << i + 1;
            throw validation_error(os.str());
        }
        if (!(s.flow > 0.0)) {
            std::ostringstream os;
            os << "telemetry: flow must be positive in row " << i + 1;
            throw validation_error(os.str());
        }
        if (!(s.voltage > 0.0 && s.voltage < 5.0)) {
            std::ostringstream os;
            os << "telemetry: voltage outside (0, 5) V in row " << i + 1;
            throw validation_error(os.str());
        }
        if (i > 0 && !(s.t > samples[i - 1].t)) {
            std::ostringstream os;
            os << "telemetry: timestamps not strictly increasing at row " << i + 1;
            throw validation_error(os.str());
        }
    }
    const double med = median_spacing(samples);
    if (med > 0.0) {
        for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
            if (samples[i + 1].t - samples[i].t > 10.0 * med) {
                std::ostringstream os;
                os << "telemetry: gap after row " << i + 1 << " exceeds 10x median spacing";
                throw validation_error(os.str());
            }
        }
    }
}

TelemetryTrace load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("telemetry: cannot open " + path);

    TelemetryTrace trace;
    trace.source = TraceSource::file;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != kHeader) {
                std::ostringstream os;
                os << "telemetry: line " << line_no << ": header must be exactly '"
                   << kHeader << "'";
                throw validation_error(os.str());
            }
            header_seen = true;
            continue;
        }
        std::array<double, 4> vals{};
        std::size_t pos = 0;
        for (int k = 0; k < 4; ++k) {
            const std::size_t next = line.find(',', pos);
            const std::string cell = line.substr(
                pos, next == std::string::npos ? std::string::npos : next - pos);
            try {
                std::size_t used = 0;
                vals[k] = std::stod(cell, &used);
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
                    ++used;
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                std::ostringstream os;
                os << "telemetry: line " << line_no << ": cannot parse field " << k + 1;
                throw validation_error(os.str());
            }
            if (k < 3) {
                if (next == std::string::npos) {
                    std::ostringstream os;
                    os << "telemetry: line " << line_no << ": expected 4 fields";
                    throw validation_error(os.str());
                }
                pos = next + 1;
            } else if (next != std::string::npos) {
                std::ostringstream os;
                os << "telemetry: line " << line_no << ": expected 4 fields";
                throw validation_error(os.str());
            }
        }
        TelemetrySample s;
        s.t = vals[0];
        s.voltage = vals[1];
        s.current = vals[2];
        s.flow = vals[3] / kFlowMlMinPerLs;
        trace.samples.push_back(s);
    }
    if (!header_seen) throw validation_error("telemetry: missing header in " + path);
    trace.validate();
    return trace;
}

void write_csv(const TelemetryTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("telemetry: cannot write " + path);
    out << kHeader << "\n";
    char buf[128];
    for (const auto& s : trace.samples) {
        std::snprintf(buf, sizeof buf, "%.15g,%.15g,%.15g,%.15g\n", s.t, s.voltage,
                      s.current, s.flow * kFlowMlMinPerLs);
        out << buf;
    }
    if (!out) throw config_error("telemetry: write failed for " + path);
}

TelemetryTrace resample(const TelemetryTrace& trace, double dt) {
    if (!(dt > 0.0)) throw validation_error("telemetry: resample needs dt > 0");
    trace.validate();
    TelemetryTrace out;
    out.source = trace.source;
    out.dt_resampled = dt;
    if (trace.samples.empty()) return out;
    const double t0 = trace.samples.front().t;
    const double t_end = trace.samples.back().t;
    const std::size_t n = static_cast<std::size_t>(
        std::floor((t_end - t0) / dt + 1e-9)) + 1;
    out.samples.reserve(n);
    std::size_t j = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = t0 + static_cast<double>(k) * dt;
        while (j + 1 < trace.samples.size() && trace.samples[j + 1].t <= t) ++j;
        const auto& lo = trace.samples[j];
        TelemetrySample s;
        s.t = t;
        s.current = lo.current;
        s.flow = lo.flow;
        if (j + 1 < trace.samples.size() && t > lo.t) {
            const auto& hi = trace.samples[j + 1];
            const double w = (t - lo.t) / (hi.t - lo.t);
            s.voltage = lo.voltage + w * (hi.voltage - lo.voltage);
        } else {
            s.voltage = lo.voltage;
        }
        out.samples.push_back(s);
    }
    return out;
}

TelemetryTrace synthesize_trace(const BatteryParams& p, double k_mt,
                                const StateVector& x0, double dt, double t_end,
                                double noise_w, std::uint64_t seed,
                                double q_flow) {
    p.validate();
    if (!(dt > 0.0) || !(t_end > 0.0))
        throw validation_error("telemetry: synthesize needs dt > 0 and t_end > 0");
    if (noise_w < 0.0) throw validation_error("telemetry: noise_w must be >= 0");
    if (!(q_flow > 0.0)) throw validation_error("telemetry: flow must be positive");
    if (k_mt < 0.0) throw validation_error("telemetry: k_mt must be >= 0");

    // integrate finer than the output cadence so the cadence can stay coarse
    const std::size_t stride = static_cast<std::size_t>(
        std::max(1.0, std::ceil(dt / 1.0 - 1e-9)));
    const double dt_int = dt / static_cast<double>(stride);

    const ModelMatrices m = assemble_matrices(p);
    const LinearCrossover lc{k_mt};
    const FluxFn flux_fn = [&](double s) { return linear_crossover_flux(lc, p, s); };
    const SimResult sim = simulate(p, m, flux_fn, InputSeries::constant(0.0, q_flow),
                                   x0, dt_int, t_end, stride);

    std::mt19937_64 gen(seed);
    auto noise = [&]() {
        // top 53 bits -> [0,1); uniform on [-3 noise_w, 3 noise_w]
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        return (2.0 * u - 1.0) * 3.0 * noise_w;
    };

    TelemetryTrace trace;
    trace.source = TraceSource::synthetic;
    trace.dt_resampled = dt;
    trace.samples.reserve(sim.rows.size());
    for (const auto& row : sim.rows) {
        TelemetrySample s;
        s.t = row.t;
        s.voltage = row.voltage + (noise_w > 0.0 ? noise() : 0.0);
        s.current = 0.0;
        s.flow = q_flow;
        trace.samples.push_back(s);
    }
    trace.validate();
    return trace;
}

} // namespace drfb
