#include "cfmrx/frame.hpp"

namespace cfmrx {

PilotConfig PilotConfig::sip(const FrameConfig& f, double data_power) {
    f.validate();
    if (data_power < 0.0 || data_power > 1.0)
        throw std::invalid_argument("PilotConfig::sip: data power split must be in [0, 1]");
    PilotConfig pc;
    pc.scheme = PilotScheme::SIP;
    pc.data_amp = std::sqrt(data_power);
    pc.pilot_amp = std::sqrt(1.0 - data_power);
    pc.data_mask = RealGrid(f.n_subcarriers, f.n_symbols, 1.0);
    pc.pilot_mask = RealGrid(f.n_subcarriers, f.n_symbols, 1.0);
    return pc;
}

PilotConfig PilotConfig::op(const FrameConfig& f, int pilot_symbol) {
    f.validate();
    if (pilot_symbol < 0 || pilot_symbol >= f.n_symbols)
        throw std::invalid_argument("PilotConfig::op: pilot symbol index out of range");
    PilotConfig pc;
    pc.scheme = PilotScheme::OP;
    pc.data_amp = 1.0;
    pc.pilot_amp = 1.0;
    pc.data_mask = RealGrid(f.n_subcarriers, f.n_symbols, 1.0);
    pc.pilot_mask = RealGrid(f.n_subcarriers, f.n_symbols, 0.0);
    for (int s = 0; s < f.n_subcarriers; ++s) {
        pc.data_mask(s, pilot_symbol) = 0.0;
        pc.pilot_mask(s, pilot_symbol) = 1.0;
    }
    return pc;
}

void PilotConfig::validate() const {
    if (data_mask.rows() != pilot_mask.rows() || data_mask.cols() != pilot_mask.cols())
        throw std::invalid_argument("PilotConfig: mask shapes differ");
    if (scheme == PilotScheme::SIP) {
        double p = data_amp * data_amp + pilot_amp * pilot_amp;
        if (std::abs(p - 1.0) > 1e-9)
            throw std::invalid_argument("PilotConfig: SIP amplitudes must satisfy a_d^2 + a_p^2 = 1");
        for (size_t i = 0; i < data_mask.size(); ++i)
            if (data_mask[i] != 1.0 || pilot_mask[i] != 1.0)
                throw std::invalid_argument("PilotConfig: SIP masks must be all-ones");
    } else {
        for (size_t i = 0; i < data_mask.size(); ++i) {
            bool d = data_mask[i] == 1.0, p = pilot_mask[i] == 1.0;
            bool dz = data_mask[i] == 0.0, pz = pilot_mask[i] == 0.0;
            if (!((d && pz) || (dz && p)))
                throw std::invalid_argument("PilotConfig: OP masks must be binary and complementary");
        }
    }
}

}  // namespace cfmrx
