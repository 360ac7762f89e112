// Link-level metrics: NMSE, BER, throughput and bootstrap confidence
// intervals.
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cfmrx/grid.hpp"

namespace cfmrx {

// ||est - truth||^2 / ||truth||^2 for one frame.
double nmse_ratio(const ChannelTensor& est, const ChannelTensor& truth);

// 10 log10 of the mean ratio, floored at -100 dB; ratios are averaged over
// frames before taking the log.
double nmse_db(std::span<const double> frame_ratios);
double nmse_db(const ChannelTensor& est, const ChannelTensor& truth);

double ber(const std::vector<uint8_t>& bits_hat, const std::vector<uint8_t>& bits);

struct ThroughputParams {
    double slots_per_second = 1000.0;  // 1 ms slots
    double res_per_slot = 576.0;
    double data_fraction = 1.0;  // Omega
    double code_rate = 1.0;      // gamma
    int bits_per_symbol = 2;     // M

    void validate() const;
};

// R = N_slot * N_RE * Omega * gamma * M * (1 - BER).
double throughput_bps(const ThroughputParams& tp, double ber_value);

// Seeded percentile bootstrap; needs at least 10 samples, level in (0, 1).
std::pair<double, double> confidence_interval(std::span<const double> samples, double level = 0.90,
                                              int resamples = 1000, uint64_t seed = 0x626f6f74);

}  // namespace cfmrx
