#include "cfmrx/transmit.hpp"

#include <stdexcept>

#include "cfmrx/constellation.hpp"
#include "cfmrx/rng.hpp"

namespace cfmrx {

LayerGrids generate_pilots(const FrameConfig& f, uint64_t seed) {
    f.validate();
    static const Constellation qpsk = build_constellation(2, ModFamily::QAM);
    LayerGrids pilots;
    pilots.reserve(f.n_layers);
    for (int l = 0; l < f.n_layers; ++l) {
        Rng rng(mix_seed(seed, uint64_t(l)));
        ComplexGrid p(f.n_subcarriers, f.n_symbols);
        for (size_t i = 0; i < p.size(); ++i) p[i] = qpsk.points[rng.next_u64() & 3];
        pilots.push_back(std::move(p));
    }
    return pilots;
}

LayerGrids compose_transmit(const LayerGrids& data, const LayerGrids& pilots, const PilotConfig& pc) {
    pc.validate();
    if (data.size() != pilots.size())
        throw std::invalid_argument("compose_transmit: layer counts differ");
    LayerGrids x;
    x.reserve(data.size());
    for (size_t l = 0; l < data.size(); ++l) {
        const ComplexGrid& d = data[l];
        const ComplexGrid& p = pilots[l];
        if (!d.same_shape(p) || size_t(d.rows()) != size_t(pc.data_mask.rows()) ||
            size_t(d.cols()) != size_t(pc.data_mask.cols()))
            throw std::invalid_argument("compose_transmit: grid/mask shape mismatch");
        ComplexGrid g(d.rows(), d.cols());
        for (size_t i = 0; i < g.size(); ++i)
            g[i] = pc.data_amp * pc.data_mask[i] * d[i] + pc.pilot_amp * pc.pilot_mask[i] * p[i];
        x.push_back(std::move(g));
    }
    return x;
}

std::vector<ComplexGrid> apply_channel_and_noise(const LayerGrids& x, const ChannelTensor& h,
                                                 const NoiseModel& nm, uint64_t seed) {
    if (int(x.size()) != h.n_layers)
        throw std::invalid_argument("apply_channel_and_noise: layer counts differ");
    const int rows = x[0].rows(), cols = x[0].cols();
    std::vector<ComplexGrid> y;
    y.reserve(h.n_rx);
    Rng rng(mix_seed(seed, tag::kNoise));
    for (int r = 0; r < h.n_rx; ++r) {
        ComplexGrid g(rows, cols);
        for (int l = 0; l < h.n_layers; ++l) {
            const ComplexGrid& hs = h.at(r, l);
            if (!hs.same_shape(x[l]))
                throw std::invalid_argument("apply_channel_and_noise: channel/transmit shape mismatch");
            for (size_t i = 0; i < g.size(); ++i) g[i] += hs[i] * x[l][i];
        }
        for (size_t i = 0; i < g.size(); ++i) g[i] += rng.cgauss(nm.variance);
        y.push_back(std::move(g));
    }
    return y;
}

}  // namespace cfmrx
