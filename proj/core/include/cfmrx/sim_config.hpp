// Simulation configuration: one nested document covering frame, channel
// profile, pilots, modulation, sampler, training and sweep sections, with
// JSON encoding for files.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfmrx/channel.hpp"
#include "cfmrx/constellation.hpp"
#include "cfmrx/frame.hpp"
#include "cfmrx/sampler.hpp"
#include "cfmrx/velocity_net.hpp"

namespace cfmrx {

struct ProfileSpec {
    int n_taps = 8;
    double tap_step_s = 150e-9;
    double tau_rms_s = 300e-9;
    double subcarrier_spacing_hz = 15e3;
    double time_corr = -1.0;  // < 0 selects the Jakes desk default

    ChannelProfile build() const;
};

struct PilotSpec {
    PilotScheme scheme = PilotScheme::SIP;
    double data_power = 0.9;
    int op_pilot_symbol = 0;

    PilotConfig build(const FrameConfig& f) const;
};

struct ModulationSpec {
    int order = 2;
    ModFamily family = ModFamily::QAM;

    Constellation build() const { return build_constellation(order, family); }
};

struct SamplerSpec {
    int steps = 30;
    int corrector_iters = 5;
    double corrector_scale = 0.2;  // 1/K
    std::string corrector_mode = "normalized";  // normalized | kappa | bare
    bool corrector_printed_sign = false;

    SamplerConfig build(double noise_var, uint64_t seed) const;
};

struct TrainingSpec {
    int dataset_samples = 2000;
    NetConfig net;
    TrainConfig train;
};

struct SweepSpec {
    std::vector<double> snr_db{-10, -5, 0, 5, 10, 15, 20};
    int frames_per_node = 200;
    int covariance_snapshots = 100;  // practical LMMSE statistics
    std::vector<std::string> schemes{"SIP", "OP"};
    std::vector<std::string> receivers{"CFM-Rx", "CFM-TEQ", "LS", "LMMSE-O", "LMMSE-P"};
    std::string prior = "gaussian";  // or "net"
    std::string weights_path;
    double slots_per_second = 1000.0;
    double code_rate = 1.0;
    int threads = 0;  // 0 = hardware concurrency
    // Optional per-SNR corrector scale overrides, pairs of (snr_db, c).
    std::vector<std::pair<double, double>> corrector_scale_by_snr;

    double corrector_scale_at(double snr, double fallback) const;
};

struct SimConfig {
    FrameConfig frame;
    ProfileSpec profile;
    PilotSpec pilot;
    ModulationSpec modulation;
    SamplerSpec sampler;
    TrainingSpec training;
    SweepSpec sweep;

    static SimConfig load(const std::string& path);
    void save(const std::string& path) const;
    std::string to_json() const;
    static SimConfig from_json(const std::string& text);
};

}  // namespace cfmrx
