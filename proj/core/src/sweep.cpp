#include "cfmrx/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "cfmrx/baselines.hpp"
#include "cfmrx/rng.hpp"
#include "cfmrx/transmit.hpp"

namespace cfmrx {

namespace {

void parallel_for(size_t count, int threads, const std::function<void(size_t)>& fn) {
    if (threads <= 0) threads = int(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, int(count)));
    if (threads == 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mu;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::vector<uint8_t> random_bits(size_t count, uint64_t seed) {
    Rng rng(seed);
    std::vector<uint8_t> bits(count);
    for (auto& b : bits) b = uint8_t(rng.next_u64() & 1);
    return bits;
}

// Bits on data-carrying REs only, in row-major RE order per layer.
std::vector<uint8_t> data_re_bits(const std::vector<uint8_t>& bits, const PilotConfig& pc,
                                  int bits_per_symbol, int n_layers) {
    const size_t res = pc.data_mask.size();
    std::vector<uint8_t> out;
    out.reserve(bits.size());
    for (int l = 0; l < n_layers; ++l)
        for (size_t i = 0; i < res; ++i) {
            if (pc.data_mask[i] == 0.0) continue;
            size_t base = (size_t(l) * res + i) * size_t(bits_per_symbol);
            for (int b = 0; b < bits_per_symbol; ++b) out.push_back(bits[base + b]);
        }
    return out;
}

double symbol_error_rate(const std::vector<uint8_t>& bits_hat, const std::vector<uint8_t>& bits,
                         int bits_per_symbol) {
    size_t symbols = bits.size() / size_t(bits_per_symbol);
    if (symbols == 0) return 0.0;
    size_t errors = 0;
    for (size_t s = 0; s < symbols; ++s) {
        for (int b = 0; b < bits_per_symbol; ++b)
            if (bits_hat[s * bits_per_symbol + b] != bits[s * bits_per_symbol + b]) {
                ++errors;
                break;
            }
    }
    return double(errors) / double(symbols);
}

struct SchemeContext {
    PilotConfig pc;
    Constellation constellation;
    ChannelProfile profile;
    ChannelStats oracle_stats;
    ChannelStats practical_stats;
    std::unique_ptr<GaussianChannelPrior> gaussian_prior;
    std::unique_ptr<NetVelocityField> net_prior;
    const ChannelVelocityField* prior = nullptr;
};

}  // namespace

const NodeFrames* SweepResult::find(const std::string& scheme, const std::string& receiver,
                                    double snr_db) const {
    for (const NodeFrames& n : nodes)
        if (n.scheme == scheme && n.receiver == receiver && n.snr_db == snr_db) return &n;
    return nullptr;
}

SweepResult run_sweep(const SimConfig& cfg, uint64_t master_seed) {
    cfg.frame.validate();
    SweepResult result;
    result.master_seed = master_seed;

    for (size_t scheme_idx = 0; scheme_idx < cfg.sweep.schemes.size(); ++scheme_idx) {
        const std::string& scheme_name = cfg.sweep.schemes[scheme_idx];
        SchemeContext ctx;
        {
            PilotSpec ps = cfg.pilot;
            if (scheme_name == "SIP")
                ps.scheme = PilotScheme::SIP;
            else if (scheme_name == "OP")
                ps.scheme = PilotScheme::OP;
            else
                throw std::invalid_argument("run_sweep: unknown scheme: " + scheme_name);
            ctx.pc = ps.build(cfg.frame);
        }
        ctx.constellation = cfg.modulation.build();
        ctx.profile = cfg.profile.build();
        ctx.oracle_stats = oracle_covariance(ctx.profile, cfg.frame);

        {
            // Practical covariance from a dedicated snapshot stream.
            std::vector<ChannelTensor> snaps;
            snaps.reserve(cfg.sweep.covariance_snapshots);
            for (int k = 0; k < cfg.sweep.covariance_snapshots; ++k)
                snaps.push_back(generate_channel(
                    ctx.profile, cfg.frame,
                    mix_seed(mix_seed(master_seed, 0x736e6170), uint64_t(k))));
            ctx.practical_stats = sample_covariance(snaps, snaps.size());
        }

        if (cfg.sweep.prior == "net") {
            if (cfg.sweep.weights_path.empty())
                throw std::runtime_error(
                    "run_sweep: prior=net requires sweep.weights_path; train one with "
                    "`cfmrx train-prior` first");
            ctx.net_prior = std::make_unique<NetVelocityField>(VelocityNet::load(cfg.sweep.weights_path));
            ctx.prior = ctx.net_prior.get();
        } else if (cfg.sweep.prior == "gaussian") {
            ctx.gaussian_prior = std::make_unique<GaussianChannelPrior>(ctx.oracle_stats);
            ctx.prior = ctx.gaussian_prior.get();
        } else {
            throw std::invalid_argument("run_sweep: unknown prior backend: " + cfg.sweep.prior);
        }

        for (size_t snr_idx = 0; snr_idx < cfg.sweep.snr_db.size(); ++snr_idx) {
            const double snr = cfg.sweep.snr_db[snr_idx];
            const NoiseModel nm = NoiseModel::from_snr_db(snr);
            const int n_frames = cfg.sweep.frames_per_node;
            const double cscale =
                cfg.sweep.corrector_scale_at(snr, cfg.sampler.corrector_scale);

            LmmseContext ctx_oracle(ctx.oracle_stats, ctx.pc, nm.variance);
            LmmseContext ctx_practical(ctx.practical_stats, ctx.pc, nm.variance);

            std::map<std::string, std::vector<FrameMetrics>> per_receiver;
            for (const std::string& r : cfg.sweep.receivers)
                per_receiver[r].resize(n_frames);

            parallel_for(size_t(n_frames), cfg.sweep.threads, [&](size_t fi) {
                uint64_t frame_seed =
                    mix_seed(mix_seed(mix_seed(master_seed, tag::kFrame), scheme_idx), fi);
                ChannelTensor h =
                    generate_channel(ctx.profile, cfg.frame, mix_seed(frame_seed, tag::kChannel));
                LayerGrids pilots = generate_pilots(cfg.frame, mix_seed(frame_seed, tag::kPilot));

                const int m = ctx.constellation.bits_per_symbol();
                const size_t bits_per_layer = cfg.frame.res_per_frame() * size_t(m);
                std::vector<uint8_t> bits =
                    random_bits(bits_per_layer * cfg.frame.n_layers, mix_seed(frame_seed, tag::kDataBits));
                LayerGrids data;
                for (int l = 0; l < cfg.frame.n_layers; ++l) {
                    std::vector<uint8_t> layer_bits(bits.begin() + l * bits_per_layer,
                                                    bits.begin() + (l + 1) * bits_per_layer);
                    data.push_back(modulate_bits(layer_bits, ctx.constellation, cfg.frame.n_subcarriers,
                                                 cfg.frame.n_symbols));
                }
                LayerGrids x = compose_transmit(data, pilots, ctx.pc);
                std::vector<ComplexGrid> y = apply_channel_and_noise(
                    x, h, nm, mix_seed(mix_seed(frame_seed, tag::kNoise), snr_idx));

                std::vector<uint8_t> truth_bits = data_re_bits(bits, ctx.pc, m, cfg.frame.n_layers);

                auto record = [&](const std::string& name, const ChannelTensor& h_est,
                                  const std::vector<uint8_t>& est_bits_full) {
                    auto it = per_receiver.find(name);
                    if (it == per_receiver.end()) return;
                    FrameMetrics fm;
                    fm.nmse_ratio = nmse_ratio(h_est, h);
                    fm.channel_energy = h.squared_norm();
                    std::vector<uint8_t> est_bits =
                        data_re_bits(est_bits_full, ctx.pc, m, cfg.frame.n_layers);
                    fm.ber = ber(est_bits, truth_bits);
                    fm.ser = symbol_error_rate(est_bits, truth_bits, m);
                    fm.data_bits = truth_bits.size();
                    it->second[fi] = fm;
                };

                auto equalized_bits = [&](const ChannelTensor& h_est) {
                    LayerGrids x_hat = lmmse_equalize(y, h_est, nm.variance);
                    LayerGrids d_hat = strip_pilots(x_hat, pilots, ctx.pc);
                    std::vector<uint8_t> out;
                    for (const ComplexGrid& dg : d_hat) {
                        std::vector<uint8_t> b = hard_demap(dg, ctx.constellation);
                        out.insert(out.end(), b.begin(), b.end());
                    }
                    return out;
                };

                bool want_cfm_rx = per_receiver.count("CFM-Rx") > 0;
                bool want_cfm_teq = per_receiver.count("CFM-TEQ") > 0;
                if (want_cfm_rx || want_cfm_teq) {
                    SamplerConfig scfg = cfg.sampler.build(
                        nm.variance, mix_seed(mix_seed(frame_seed, tag::kSamplerInit), snr_idx));
                    scfg.corrector_scale = cscale;
                    CfmRxResult rx = run_cfm_rx(y, pilots, ctx.pc, *ctx.prior, ctx.constellation,
                                                cfg.frame, scfg);
                    if (want_cfm_rx) record("CFM-Rx", rx.h0, rx.bits);
                    if (want_cfm_teq) record("CFM-TEQ", rx.h0, equalized_bits(rx.h0));
                }
                if (per_receiver.count("LS") || per_receiver.count("LMMSE-O") ||
                    per_receiver.count("LMMSE-P")) {
                    ChannelTensor ls = ls_estimate(y, pilots, ctx.pc);
                    if (per_receiver.count("LS")) record("LS", ls, equalized_bits(ls));
                    if (per_receiver.count("LMMSE-O")) {
                        ChannelTensor est = lmmse_estimate(ls, ctx_oracle, ctx.pc);
                        record("LMMSE-O", est, equalized_bits(est));
                    }
                    if (per_receiver.count("LMMSE-P")) {
                        ChannelTensor est = lmmse_estimate(ls, ctx_practical, ctx.pc);
                        record("LMMSE-P", est, equalized_bits(est));
                    }
                }
            });

            for (const std::string& rname : cfg.sweep.receivers) {
                const std::vector<FrameMetrics>& frames = per_receiver[rname];
                std::vector<double> ratios(frames.size()), bers(frames.size());
                double ser_acc = 0;
                for (size_t i = 0; i < frames.size(); ++i) {
                    ratios[i] = frames[i].nmse_ratio;
                    bers[i] = frames[i].ber;
                    ser_acc += frames[i].ser;
                }
                MetricRecord rec;
                rec.scheme = scheme_name;
                rec.receiver = rname;
                rec.snr_db = snr;
                rec.frames = n_frames;
                rec.seed = master_seed;
                rec.nmse_db = nmse_db(ratios);
                rec.ser = ser_acc / double(frames.size());
                double ber_mean = 0;
                for (double b : bers) ber_mean += b;
                rec.ber = ber_mean / double(bers.size());
                uint64_t ci_seed = mix_seed(mix_seed(master_seed, scheme_idx), snr_idx);
                if (frames.size() >= 10) {
                    auto [rlo, rhi] = confidence_interval(ratios, 0.90, 1000, ci_seed);
                    rec.nmse_ci_lo = std::max(-100.0, 10.0 * std::log10(std::max(rlo, 1e-12)));
                    rec.nmse_ci_hi = std::max(-100.0, 10.0 * std::log10(std::max(rhi, 1e-12)));
                    auto [blo, bhi] = confidence_interval(bers, 0.90, 1000, mix_seed(ci_seed, 1));
                    rec.ber_ci_lo = blo;
                    rec.ber_ci_hi = bhi;
                } else {
                    rec.nmse_ci_lo = rec.nmse_ci_hi = rec.nmse_db;
                    rec.ber_ci_lo = rec.ber_ci_hi = rec.ber;
                }
                ThroughputParams tp;
                tp.slots_per_second = cfg.sweep.slots_per_second;
                tp.res_per_slot = double(cfg.frame.res_per_frame());
                tp.data_fraction = ctx.pc.data_fraction();
                tp.code_rate = cfg.sweep.code_rate;
                tp.bits_per_symbol = ctx.constellation.bits_per_symbol();
                rec.throughput_bps = throughput_bps(tp, rec.ber);
                result.records.push_back(rec);

                NodeFrames nf;
                nf.scheme = scheme_name;
                nf.receiver = rname;
                nf.snr_db = snr;
                nf.frames = frames;
                result.nodes.push_back(std::move(nf));
            }
        }
    }
    return result;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

void write_metrics_csv(const std::string& path, const std::vector<MetricRecord>& records) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("sweep: cannot open for writing: " + path);
    os << "scheme,receiver,snr_db,nmse_db,nmse_ci_lo,nmse_ci_hi,ber,ber_ci_lo,ber_ci_hi,"
          "throughput_bps,frames,seed\n";
    for (const MetricRecord& r : records) {
        os << r.scheme << ',' << r.receiver << ',' << format_double(r.snr_db) << ','
           << format_double(r.nmse_db) << ',' << format_double(r.nmse_ci_lo) << ','
           << format_double(r.nmse_ci_hi) << ',' << format_double(r.ber) << ','
           << format_double(r.ber_ci_lo) << ',' << format_double(r.ber_ci_hi) << ','
           << format_double(r.throughput_bps) << ',' << r.frames << ',' << r.seed << '\n';
    }
    if (!os) throw std::runtime_error("sweep: write failed: " + path);
}

namespace {

void write_one_series(const std::string& path, const std::vector<MetricRecord>& records,
                      double MetricRecord::*field) {
    std::vector<double> snrs;
    std::vector<std::string> series;
    for (const MetricRecord& r : records) {
        if (std::find(snrs.begin(), snrs.end(), r.snr_db) == snrs.end()) snrs.push_back(r.snr_db);
        std::string key = r.scheme + "_" + r.receiver;
        if (std::find(series.begin(), series.end(), key) == series.end()) series.push_back(key);
    }
    std::sort(snrs.begin(), snrs.end());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("sweep: cannot open for writing: " + path);
    os << "snr_db";
    for (const std::string& s : series) os << ',' << s;
    os << '\n';
    for (double snr : snrs) {
        os << format_double(snr);
        for (const std::string& s : series) {
            bool found = false;
            for (const MetricRecord& r : records)
                if (r.snr_db == snr && r.scheme + "_" + r.receiver == s) {
                    os << ',' << format_double(r.*field);
                    found = true;
                    break;
                }
            if (!found) os << ',';
        }
        os << '\n';
    }
}

}  // namespace

void write_series_csv(const std::string& dir, const std::vector<MetricRecord>& records) {
    write_one_series(dir + "/series_nmse_db.csv", records, &MetricRecord::nmse_db);
    write_one_series(dir + "/series_ber.csv", records, &MetricRecord::ber);
    write_one_series(dir + "/series_throughput_bps.csv", records, &MetricRecord::throughput_bps);
}

void write_summary(const std::string& path, const std::vector<MetricRecord>& records) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("sweep: cannot open for writing: " + path);
    os << "scheme  receiver  snr_db  nmse_db  ber  throughput_bps  frames\n";
    for (const MetricRecord& r : records) {
        os << r.scheme << "  " << r.receiver << "  " << format_double(r.snr_db) << "  "
           << format_double(r.nmse_db) << "  " << format_double(r.ber) << "  "
           << format_double(r.throughput_bps) << "  " << r.frames << '\n';
    }
}

}  // namespace cfmrx
