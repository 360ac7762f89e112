// Microbenchmarks for the hot paths: channel generation, velocity fields,
// likelihood refinement and the full receiver loop.
#include <benchmark/benchmark.h>

#include "cfmrx/baselines.hpp"
#include "cfmrx/prior.hpp"
#include "cfmrx/rng.hpp"
#include "cfmrx/sampler.hpp"
#include "cfmrx/transmit.hpp"
#include "cfmrx/velocity_net.hpp"

using namespace cfmrx;

namespace {

struct Fixture {
    FrameConfig frame{48, 12, 4, 1};
    ChannelProfile profile = ChannelProfile::desk_default();
    ChannelStats stats = oracle_covariance(profile, frame);
    GaussianChannelPrior prior{stats};
    Constellation qpsk = build_constellation(2, ModFamily::QAM);
    PilotConfig pc = PilotConfig::sip(frame, 0.9);
    NoiseModel nm = NoiseModel::from_snr_db(10);
    ChannelTensor h;
    LayerGrids d, p;
    std::vector<ComplexGrid> y;

    Fixture() {
        uint64_t seed = 42;
        h = generate_channel(profile, frame, mix_seed(seed, 1));
        p = generate_pilots(frame, mix_seed(seed, 2));
        Rng rng(mix_seed(seed, 3));
        std::vector<uint8_t> bits(frame.res_per_frame() * 2);
        for (auto& b : bits) b = uint8_t(rng.next_u64() & 1);
        d = {modulate_bits(bits, qpsk, 48, 12)};
        y = apply_channel_and_noise(compose_transmit(d, p, pc), h, nm, mix_seed(seed, 4));
    }
};

Fixture& fixture() {
    static Fixture fx;
    return fx;
}

}  // namespace

static void BM_GenerateChannel(benchmark::State& state) {
    Fixture& fx = fixture();
    uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(generate_channel(fx.profile, fx.frame, ++seed));
}
BENCHMARK(BM_GenerateChannel);

static void BM_GaussianPriorVelocity(benchmark::State& state) {
    Fixture& fx = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(fx.prior.velocity(fx.h.at(0, 0), 0.5));
}
BENCHMARK(BM_GaussianPriorVelocity);

static void BM_ConstellationPosteriorMean(benchmark::State& state) {
    Fixture& fx = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(constellation_posterior_mean(fx.d[0], 0.5, 0.5, fx.qpsk));
}
BENCHMARK(BM_ConstellationPosteriorMean);

static void BM_LikelihoodScores(benchmark::State& state) {
    Fixture& fx = fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            likelihood_score_h(fx.h, fx.d, fx.y, fx.p, fx.pc, 0.5, fx.nm.variance));
        benchmark::DoNotOptimize(
            likelihood_score_d(fx.h, fx.d, fx.y, fx.p, fx.pc, 0.5, fx.nm.variance));
    }
}
BENCHMARK(BM_LikelihoodScores);

static void BM_LmmseEstimate(benchmark::State& state) {
    Fixture& fx = fixture();
    LmmseContext ctx(fx.stats, fx.pc, fx.nm.variance);
    ChannelTensor ls = ls_estimate(fx.y, fx.p, fx.pc);
    for (auto _ : state) benchmark::DoNotOptimize(lmmse_estimate(ls, ctx, fx.pc));
}
BENCHMARK(BM_LmmseEstimate);

static void BM_CfmRxFrame(benchmark::State& state) {
    Fixture& fx = fixture();
    SamplerConfig cfg;
    cfg.noise_var = fx.nm.variance;
    cfg.seed = 7;
    for (auto _ : state)
        benchmark::DoNotOptimize(run_cfm_rx(fx.y, fx.p, fx.pc, fx.prior, fx.qpsk, fx.frame, cfg));
}
BENCHMARK(BM_CfmRxFrame)->Unit(benchmark::kMillisecond);

static void BM_NetForward(benchmark::State& state) {
    Fixture& fx = fixture();
    NetConfig nc;
    VelocityNet net = VelocityNet::init(48, 12, nc, 3);
    for (auto _ : state) benchmark::DoNotOptimize(net.velocity(fx.h.at(0, 0), 0.5));
}
BENCHMARK(BM_NetForward);

BENCHMARK_MAIN();
