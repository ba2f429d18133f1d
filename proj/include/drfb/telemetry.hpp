#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drfb/battery.hpp"

namespace drfb {

struct TelemetrySample {
    double t = 0.0;       // [s]
    double voltage = 0.0; // [V]
    double current = 0.0; // [A]
    double flow = 0.0;    // [L/s]
};

enum class TraceSource { file, synthetic };

struct TelemetryTrace {
    std::vector<TelemetrySample> samples;
    double dt_resampled = 0.0; // 0 means not on a uniform grid
    TraceSource source = TraceSource::file;

    void validate() const; // ordering, ranges, gap rule
};

// CSV header is fixed: t_s,voltage_V,current_A,flow_mL_min
TelemetryTrace load_csv(const std::string& path);
void write_csv(const TelemetryTrace& trace, const std::string& path);

// voltage linearly interpolated, current and flow zero-order held
TelemetryTrace resample(const TelemetryTrace& trace, double dt);

// Self-discharge twin: open-circuit simulation with linear crossover,
// voltage from the cell potential plus bounded uniform noise.
TelemetryTrace synthesize_trace(const BatteryParams& p, double k_mt,
                                const StateVector& x0, double dt, double t_end,
                                double noise_w, std::uint64_t seed,
                                double q_flow);

} // namespace drfb
