// SNR sweeps over (scheme, receiver) pairs with deterministic per-frame
// seeding, aggregation with bootstrap confidence intervals, and CSV emission.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfmrx/metrics.hpp"
#include "cfmrx/sim_config.hpp"

namespace cfmrx {

struct MetricRecord {
    std::string scheme;
    std::string receiver;
    double snr_db = 0;
    double nmse_db = 0, nmse_ci_lo = 0, nmse_ci_hi = 0;
    double ber = 0, ber_ci_lo = 0, ber_ci_hi = 0;
    double ser = 0;
    double throughput_bps = 0;
    int frames = 0;
    uint64_t seed = 0;
};

struct FrameMetrics {
    double nmse_ratio = 0;
    double channel_energy = 0;  // ||H||^2, for pooled-ratio statistics
    double ber = 0;
    double ser = 0;
    size_t data_bits = 0;
};

struct NodeFrames {
    std::string scheme;
    std::string receiver;
    double snr_db = 0;
    std::vector<FrameMetrics> frames;
};

struct SweepResult {
    std::vector<MetricRecord> records;
    std::vector<NodeFrames> nodes;
    uint64_t master_seed = 0;

    const NodeFrames* find(const std::string& scheme, const std::string& receiver,
                           double snr_db) const;
};

SweepResult run_sweep(const SimConfig& cfg, uint64_t master_seed);

// metrics.csv with the fixed column set; byte-deterministic for a fixed
// master seed.
void write_metrics_csv(const std::string& path, const std::vector<MetricRecord>& records);

// Wide per-metric series (one row per SNR, one column per scheme/receiver)
// for direct plotting, plus a human-readable summary.
void write_series_csv(const std::string& dir, const std::vector<MetricRecord>& records);
void write_summary(const std::string& path, const std::vector<MetricRecord>& records);

// Locale-independent shortest round-trip formatting used by all CSV output.
std::string format_double(double v);

}  // namespace cfmrx
