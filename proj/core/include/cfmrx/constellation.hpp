// Constellations, bit mapping and hard demapping.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfmrx/grid.hpp"

namespace cfmrx {

enum class ModFamily { QAM, PSK };

// Unit-average-energy constellation with Gray bit labels.
//
// Canonical point orderings:
//   PSK, M=1: {+1, -1}, labels {0, 1}.
//   PSK, M>=2: point k = exp(j*pi*(2k+1)/2^M), label = binary-reflected Gray
//              code of k, MSB first.
//   QAM, M=2: point k = ((1-2*b1) + j*(1-2*b0))/sqrt(2) with label bits
//             (b1 b0) = k; per-axis sign mapping makes the labeling Gray.
struct Constellation {
    int order = 0;  // bits per symbol
    ModFamily family = ModFamily::QAM;
    std::vector<cplx> points;
    std::vector<uint32_t> labels;         // labels[k] = bit word of points[k]
    std::vector<uint32_t> point_of_label; // inverse permutation

    int bits_per_symbol() const { return order; }
    size_t size() const { return points.size(); }
};

Constellation build_constellation(int order, ModFamily family);

// Bits are consumed MSB-first per symbol, grid filled in row-major RE order.
ComplexGrid modulate_bits(const std::vector<uint8_t>& bits, const Constellation& c, int rows, int cols);

// Nearest-point decision per RE, ties broken toward the lowest point index.
std::vector<uint8_t> hard_demap(const ComplexGrid& d, const Constellation& c);

}  // namespace cfmrx
