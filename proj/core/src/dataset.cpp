#include "cfmrx/dataset.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace cfmrx {

namespace {

constexpr char kMagic[4] = {'C', 'F', 'M', 'D'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ostream& os, uint32_t v) {
    unsigned char b[4] = {(unsigned char)(v), (unsigned char)(v >> 8), (unsigned char)(v >> 16),
                          (unsigned char)(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, uint64_t v) {
    put_u32(os, uint32_t(v));
    put_u32(os, uint32_t(v >> 32));
}

uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("dataset: corrupt file (truncated header)");
    return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}

uint64_t get_u64(std::istream& is) {
    uint64_t lo = get_u32(is);
    uint64_t hi = get_u32(is);
    return lo | (hi << 32);
}

void put_f32(std::ostream& os, float f) {
    uint32_t v;
    std::memcpy(&v, &f, 4);
    put_u32(os, v);
}

float get_f32(std::istream& is) {
    uint32_t v = get_u32(is);
    float f;
    std::memcpy(&f, &v, 4);
    return f;
}

}  // namespace

std::vector<const ComplexGrid*> ChannelDataset::all_grids() const {
    std::vector<const ComplexGrid*> out;
    out.reserve(samples.size() * (samples.empty() ? 0 : samples[0].slices.size()));
    for (const ChannelTensor& t : samples)
        for (const ComplexGrid& g : t.slices) out.push_back(&g);
    return out;
}

void write_dataset(const std::string& path, const ChannelDataset& ds) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("dataset: cannot open for writing: " + path);
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u32(os, uint32_t(ds.frame.n_subcarriers));
    put_u32(os, uint32_t(ds.frame.n_symbols));
    put_u32(os, uint32_t(ds.frame.n_rx));
    put_u32(os, uint32_t(ds.frame.n_layers));
    put_u64(os, ds.samples.size());
    put_u64(os, ds.profile_hash);
    put_u64(os, ds.seed);
    for (const ChannelTensor& t : ds.samples) {
        if (t.n_rx != ds.frame.n_rx || t.n_layers != ds.frame.n_layers)
            throw std::invalid_argument("dataset: sample dims do not match header");
        for (const ComplexGrid& g : t.slices) {
            if (g.rows() != ds.frame.n_subcarriers || g.cols() != ds.frame.n_symbols)
                throw std::invalid_argument("dataset: sample dims do not match header");
            for (size_t i = 0; i < g.size(); ++i) {
                put_f32(os, float(g[i].real()));
                put_f32(os, float(g[i].imag()));
            }
        }
    }
    if (!os) throw std::runtime_error("dataset: write failed: " + path);
}

ChannelDataset read_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("dataset: cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("dataset: bad magic (not a channel dataset): " + path);
    uint32_t version = get_u32(is);
    if (version != kVersion) throw std::runtime_error("dataset: unsupported version");

    ChannelDataset ds;
    ds.frame.n_subcarriers = int(get_u32(is));
    ds.frame.n_symbols = int(get_u32(is));
    ds.frame.n_rx = int(get_u32(is));
    ds.frame.n_layers = int(get_u32(is));
    ds.frame.validate();
    uint64_t count = get_u64(is);
    ds.profile_hash = get_u64(is);
    ds.seed = get_u64(is);

    ds.samples.reserve(count);
    for (uint64_t k = 0; k < count; ++k) {
        ChannelTensor t(ds.frame.n_rx, ds.frame.n_layers, ds.frame.n_subcarriers, ds.frame.n_symbols);
        for (ComplexGrid& g : t.slices)
            for (size_t i = 0; i < g.size(); ++i) {
                float re = get_f32(is);
                float im = get_f32(is);
                if (!is) throw std::runtime_error("dataset: corrupt file (truncated payload)");
                g[i] = cplx(re, im);
            }
        ds.samples.push_back(std::move(t));
    }
    // A payload longer than the header promises is an error, not a truncation.
    is.peek();
    if (!is.eof()) throw std::runtime_error("dataset: payload longer than header sample count");
    return ds;
}

}  // namespace cfmrx
