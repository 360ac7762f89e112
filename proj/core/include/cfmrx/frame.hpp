// Frame dimensions, pilot configuration and the noise model.
#pragma once

#include <cmath>
#include <stdexcept>

#include "cfmrx/grid.hpp"

namespace cfmrx {

struct FrameConfig {
    int n_subcarriers = 48;
    int n_symbols = 12;
    int n_rx = 4;
    int n_layers = 1;

    void validate() const {
        if (n_subcarriers < 1 || n_symbols < 1 || n_rx < 1 || n_layers < 1)
            throw std::invalid_argument("FrameConfig: all dimensions must be >= 1");
    }

    size_t res_per_frame() const { return size_t(n_subcarriers) * n_symbols; }
};

enum class PilotScheme { SIP, OP };

// SIP: data and pilots superimposed on every RE with amplitudes (a_d, a_p),
// a_d^2 + a_p^2 = 1.  OP: unit amplitudes with complementary binary masks.
struct PilotConfig {
    PilotScheme scheme = PilotScheme::SIP;
    double data_amp = std::sqrt(0.9);
    double pilot_amp = std::sqrt(0.1);
    RealGrid data_mask;
    RealGrid pilot_mask;

    static PilotConfig sip(const FrameConfig& f, double data_power = 0.9);
    // Pilots occupy one OFDM symbol column per frame.
    static PilotConfig op(const FrameConfig& f, int pilot_symbol = 0);

    void validate() const;

    // Fraction of REs carrying data (the Omega of the throughput formula).
    double data_fraction() const {
        double acc = 0;
        for (size_t i = 0; i < data_mask.size(); ++i) acc += data_mask[i];
        return acc / double(data_mask.size());
    }
};

struct NoiseModel {
    double variance = 0.1;  // per complex entry
    double snr_db = 10.0;

    // SNR is defined against unit transmit power, so sigma^2 = 10^(-SNR/10).
    static NoiseModel from_snr_db(double snr) {
        NoiseModel nm;
        nm.snr_db = snr;
        nm.variance = std::pow(10.0, -snr / 10.0);
        return nm;
    }

    void validate() const {
        if (!(variance > 0)) throw std::invalid_argument("NoiseModel: variance must be positive");
    }
};

}  // namespace cfmrx
