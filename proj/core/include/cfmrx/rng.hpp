// Deterministic random number generation and the seed fan-out scheme.
//
// Every stochastic quantity in the simulator is drawn from an Rng constructed
// with a seed derived from the master seed by mix_seed() folds.  The harness
// derives per-frame seeds as
//     frame_seed = mix(mix(mix(master, tag::kFrame), scheme_index), frame_index)
// and per-purpose substreams by folding one of the tags below plus, for noise
// and sampler initialization, the SNR node index.  Any single frame is thereby
// reproducible in isolation.
#pragma once

#include <cstdint>
#include <random>

#include "cfmrx/grid.hpp"

namespace cfmrx {

namespace tag {
inline constexpr uint64_t kFrame = 0x66726d65;
inline constexpr uint64_t kChannel = 0x6368616e;
inline constexpr uint64_t kDataBits = 0x64617461;
inline constexpr uint64_t kPilot = 0x70696c74;
inline constexpr uint64_t kNoise = 0x6e6f6973;
inline constexpr uint64_t kSamplerInit = 0x73616d70;
}  // namespace tag

// SplitMix64 finalizer; mixes a stream id into a seed.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// mt19937_64 with explicit Box-Muller so draws depend only on the standard
// generator sequence, not on library-specific distribution internals.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    // Uniform in [0, 1).
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1].
    double uniform_pos() { return double((eng_() >> 11) + 1) * 0x1.0p-53; }

    uint64_t next_u64() { return eng_(); }

    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_pos();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Circularly symmetric complex Gaussian with E|z|^2 = var.
    cplx cgauss(double var = 1.0) {
        double s = std::sqrt(var / 2.0);
        return {s * gauss(), s * gauss()};
    }

    void fill_cgauss(ComplexGrid& g, double var = 1.0) {
        for (size_t i = 0; i < g.size(); ++i) g[i] = cgauss(var);
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace cfmrx
