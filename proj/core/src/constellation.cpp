#include "cfmrx/constellation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cfmrx {

namespace {

uint32_t gray_code(uint32_t k) { return k ^ (k >> 1); }

}  // namespace

Constellation build_constellation(int order, ModFamily family) {
    Constellation c;
    c.order = order;
    c.family = family;

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    if (family == ModFamily::QAM) {
        if (order != 2) throw std::invalid_argument("build_constellation: QAM supports order 2 only");
        c.points.resize(4);
        c.labels.resize(4);
        for (uint32_t k = 0; k < 4; ++k) {
            uint32_t b1 = (k >> 1) & 1, b0 = k & 1;
            c.points[k] = cplx((1.0 - 2.0 * b1) * inv_sqrt2, (1.0 - 2.0 * b0) * inv_sqrt2);
            c.labels[k] = k;
        }
    } else {
        if (order < 1 || order > 4) throw std::invalid_argument("build_constellation: PSK supports orders 1..4");
        size_t m = size_t(1) << order;
        c.points.resize(m);
        c.labels.resize(m);
        if (order == 1) {
            c.points[0] = cplx(1.0, 0.0);
            c.points[1] = cplx(-1.0, 0.0);
            c.labels[0] = 0;
            c.labels[1] = 1;
        } else {
            for (uint32_t k = 0; k < m; ++k) {
                double ang = 3.14159265358979323846 * (2.0 * k + 1.0) / double(m);
                c.points[k] = cplx(std::cos(ang), std::sin(ang));
                c.labels[k] = gray_code(k);
            }
        }
    }

    c.point_of_label.assign(c.size(), 0);
    for (uint32_t k = 0; k < c.size(); ++k) c.point_of_label[c.labels[k]] = k;
    return c;
}

ComplexGrid modulate_bits(const std::vector<uint8_t>& bits, const Constellation& c, int rows, int cols) {
    const int m = c.order;
    const size_t n_re = size_t(rows) * cols;
    if (bits.size() != n_re * size_t(m))
        throw std::invalid_argument("modulate_bits: bit count does not match M*N_S*N_T");

    ComplexGrid out(rows, cols);
    size_t pos = 0;
    for (size_t i = 0; i < n_re; ++i) {
        uint32_t label = 0;
        for (int b = 0; b < m; ++b) label = (label << 1) | (bits[pos++] & 1);
        out[i] = c.points[c.point_of_label[label]];
    }
    return out;
}

std::vector<uint8_t> hard_demap(const ComplexGrid& d, const Constellation& c) {
    const int m = c.order;
    std::vector<uint8_t> bits(d.size() * size_t(m));
    size_t pos = 0;
    for (size_t i = 0; i < d.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        uint32_t best_k = 0;
        for (uint32_t k = 0; k < c.size(); ++k) {
            double dist = std::norm(d[i] - c.points[k]);
            if (dist < best) {
                best = dist;
                best_k = k;
            }
        }
        uint32_t label = c.labels[best_k];
        for (int b = m - 1; b >= 0; --b) bits[pos++] = uint8_t((label >> b) & 1);
    }
    return bits;
}

}  // namespace cfmrx
