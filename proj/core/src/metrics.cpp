#include "cfmrx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cfmrx/rng.hpp"

namespace cfmrx {

double nmse_ratio(const ChannelTensor& est, const ChannelTensor& truth) {
    if (est.slices.size() != truth.slices.size())
        throw std::invalid_argument("nmse: tensor extents differ");
    double num = 0, den = 0;
    for (size_t k = 0; k < est.slices.size(); ++k) {
        const ComplexGrid& a = est.slices[k];
        const ComplexGrid& b = truth.slices[k];
        if (!a.same_shape(b)) throw std::invalid_argument("nmse: grid shapes differ");
        for (size_t i = 0; i < a.size(); ++i) num += std::norm(a[i] - b[i]);
        den += b.squared_norm();
    }
    if (den == 0.0) throw std::invalid_argument("nmse: reference has zero norm");
    return num / den;
}

double nmse_db(std::span<const double> frame_ratios) {
    if (frame_ratios.empty()) throw std::invalid_argument("nmse: no frames");
    double acc = 0;
    for (double r : frame_ratios) acc += r;
    double mean = acc / double(frame_ratios.size());
    return std::max(-100.0, 10.0 * std::log10(std::max(mean, 0.0)));
}

double nmse_db(const ChannelTensor& est, const ChannelTensor& truth) {
    double r = nmse_ratio(est, truth);
    return nmse_db(std::span<const double>(&r, 1));
}

double ber(const std::vector<uint8_t>& bits_hat, const std::vector<uint8_t>& bits) {
    if (bits_hat.size() != bits.size()) throw std::invalid_argument("ber: length mismatch");
    if (bits.empty()) throw std::invalid_argument("ber: empty input");
    size_t errors = 0;
    for (size_t i = 0; i < bits.size(); ++i)
        if ((bits_hat[i] & 1) != (bits[i] & 1)) ++errors;
    return double(errors) / double(bits.size());
}

void ThroughputParams::validate() const {
    if (!(slots_per_second > 0) || !(res_per_slot > 0) || bits_per_symbol < 1)
        throw std::invalid_argument("ThroughputParams: rates must be positive");
    if (!(data_fraction > 0) || data_fraction > 1.0 || !(code_rate > 0) || code_rate > 1.0)
        throw std::invalid_argument("ThroughputParams: Omega and gamma must be in (0, 1]");
}

double throughput_bps(const ThroughputParams& tp, double ber_value) {
    tp.validate();
    return tp.slots_per_second * tp.res_per_slot * tp.data_fraction * tp.code_rate *
           double(tp.bits_per_symbol) * (1.0 - ber_value);
}

std::pair<double, double> confidence_interval(std::span<const double> samples, double level,
                                              int resamples, uint64_t seed) {
    if (samples.size() < 10) throw std::invalid_argument("confidence_interval: need at least 10 samples");
    if (!(level > 0.0) || level >= 1.0)
        throw std::invalid_argument("confidence_interval: level must be in (0, 1)");
    Rng rng(seed);
    const size_t n = samples.size();
    std::vector<double> means(resamples);
    for (int b = 0; b < resamples; ++b) {
        double acc = 0;
        for (size_t i = 0; i < n; ++i) acc += samples[rng.next_u64() % n];
        means[b] = acc / double(n);
    }
    std::sort(means.begin(), means.end());
    auto pick = [&](double q) {
        double pos = q * double(resamples - 1);
        size_t lo = size_t(pos);
        size_t hi = std::min(lo + 1, size_t(resamples - 1));
        double frac = pos - double(lo);
        return means[lo] * (1.0 - frac) + means[hi] * frac;
    };
    double tail = (1.0 - level) / 2.0;
    return {pick(tail), pick(1.0 - tail)};
}

}  // namespace cfmrx
