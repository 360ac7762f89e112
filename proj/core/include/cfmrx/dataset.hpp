// Channel dataset persistence.
//
// File layout (little-endian):
//   magic "CFMD" | u32 version | u32 N_S | u32 N_T | u32 N_r | u32 L
//   | u64 sample count | u64 profile hash | u64 seed
//   | payload: float32 re/im pairs, row-major (sample, r, l, s, n)
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfmrx/frame.hpp"
#include "cfmrx/grid.hpp"

namespace cfmrx {

struct ChannelDataset {
    FrameConfig frame;
    uint64_t profile_hash = 0;
    uint64_t seed = 0;
    std::vector<ChannelTensor> samples;

    // Flattened view: every (r, l) slice of every tensor, in file order.
    std::vector<const ComplexGrid*> all_grids() const;
};

void write_dataset(const std::string& path, const ChannelDataset& ds);
ChannelDataset read_dataset(const std::string& path);

}  // namespace cfmrx
