// Transmit-side composition and the post-FFT observation model
//   Y_r = sum_l H_{r,l} o X_l + N_r.
#pragma once

#include <cstdint>

#include "cfmrx/frame.hpp"
#include "cfmrx/grid.hpp"

namespace cfmrx {

// One QPSK pilot grid per layer, reproducible from the seed.
LayerGrids generate_pilots(const FrameConfig& f, uint64_t seed);

// SIP: X = a_d*D + a_p*P on every RE.  OP: X = M_d o D + M_p o P.
LayerGrids compose_transmit(const LayerGrids& data, const LayerGrids& pilots, const PilotConfig& pc);

// Per-RE fading plus i.i.d. CN(0, sigma^2) noise; returns one grid per rx antenna.
std::vector<ComplexGrid> apply_channel_and_noise(const LayerGrids& x, const ChannelTensor& h,
                                                 const NoiseModel& nm, uint64_t seed);

}  // namespace cfmrx
