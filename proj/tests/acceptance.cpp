// Acceptance suite: one pass/fail line per criterion.  Run all criteria with
// no arguments, a single one with --criterion N, or list them with --list.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "cfmrx/baselines.hpp"
#include "cfmrx/metrics.hpp"
#include "cfmrx/prior.hpp"
#include "cfmrx/rng.hpp"
#include "cfmrx/sim_config.hpp"
#include "cfmrx/sweep.hpp"
#include "cfmrx/transmit.hpp"
#include "cfmrx/velocity_net.hpp"

using namespace cfmrx;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

void parallel_frames(size_t count, const std::function<void(size_t)>& fn) {
    unsigned threads = std::max(1u, std::min(std::thread::hardware_concurrency(), 4u));
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    for (auto& th : pool) th.join();
}

// Bootstrap CI of mean(x) - mean(y) with frames paired by index.
std::pair<double, double> paired_diff_ci(const std::vector<double>& x, const std::vector<double>& y,
                                         uint64_t seed, double level = 0.95) {
    Rng rng(seed);
    const size_t n = x.size();
    const int resamples = 2000;
    std::vector<double> diffs(resamples);
    for (int b = 0; b < resamples; ++b) {
        double acc = 0;
        for (size_t i = 0; i < n; ++i) {
            size_t j = rng.next_u64() % n;
            acc += x[j] - y[j];
        }
        diffs[b] = acc / double(n);
    }
    std::sort(diffs.begin(), diffs.end());
    double tail = (1.0 - level) / 2.0;
    auto pick = [&](double q) { return diffs[size_t(q * (resamples - 1))]; };
    return {pick(tail), pick(1.0 - tail)};
}

// per-layer coordinate log-density for the finite-difference oracle
struct Probe {
    FrameConfig frame;
    PilotConfig pc;
    ChannelTensor h;
    LayerGrids d, p;
    std::vector<ComplexGrid> y;
};

Probe random_probe(uint64_t seed, int n_rx, int n_layers) {
    Probe pr;
    pr.frame = FrameConfig{4, 3, n_rx, n_layers};
    pr.pc = PilotConfig::sip(pr.frame, 0.9);
    Rng rng(seed);
    pr.h = ChannelTensor(n_rx, n_layers, 4, 3);
    for (auto& g : pr.h.slices) rng.fill_cgauss(g);
    for (int l = 0; l < n_layers; ++l) {
        ComplexGrid g(4, 3);
        rng.fill_cgauss(g);
        pr.d.push_back(g);
    }
    pr.p = generate_pilots(pr.frame, mix_seed(seed, 1));
    for (int r = 0; r < n_rx; ++r) {
        ComplexGrid g(4, 3);
        rng.fill_cgauss(g);
        pr.y.push_back(g);
    }
    return pr;
}

double loglik_h(const Probe& o, const ChannelTensor& h, double alpha, double sigma, double nv, int lt) {
    LayerGrids a = composite_symbols(o.d, o.p, o.pc);
    double acc = 0;
    for (size_t r = 0; r < o.y.size(); ++r)
        for (size_t i = 0; i < o.y[r].size(); ++i) {
            cplx res = alpha * o.y[r][i];
            for (int l = 0; l < o.frame.n_layers; ++l) res -= h.at(int(r), l)[i] * a[l][i];
            acc += -std::norm(res) / (alpha * alpha * nv + sigma * sigma * std::norm(a[lt][i]));
        }
    return acc;
}

double loglik_d(const Probe& o, const LayerGrids& d, double alpha, double sigma, double nv, int lt) {
    LayerGrids a = composite_symbols(d, o.p, o.pc);
    double acc = 0;
    const double ad = o.pc.data_amp;
    for (size_t r = 0; r < o.y.size(); ++r)
        for (size_t i = 0; i < o.y[r].size(); ++i) {
            cplx res = alpha * o.y[r][i];
            for (int l = 0; l < o.frame.n_layers; ++l) res -= o.h.at(int(r), l)[i] * a[l][i];
            acc += -std::norm(res) /
                   (alpha * alpha * nv + ad * ad * sigma * sigma * std::norm(o.h.at(int(r), lt)[i]));
        }
    return acc;
}

// ---------------------------------------------------------------------------
// criterion 1: score correctness
// ---------------------------------------------------------------------------
Outcome criterion1() {
    auto start = std::chrono::steady_clock::now();
    const double nv = 0.1;
    double worst_fd = 0;
    for (int probe = 0; probe < 100; ++probe) {
        int layers = probe % 3 == 2 ? 2 : 1;
        Probe o = random_probe(mix_seed(9100, probe), 2, layers);
        Rng trng(mix_seed(9200, probe));
        double t = 0.1 + 0.8 * trng.uniform();
        ScheduleSample s = ot_schedule().at(t);
        ChannelTensor gh = likelihood_score_h(o.h, o.d, o.y, o.p, o.pc, t, nv);
        LayerGrids gd = likelihood_score_d(o.h, o.d, o.y, o.p, o.pc, t, nv);
        const double step = 1e-6;
        int r = int(trng.next_u64() % o.frame.n_rx);
        int lt = int(trng.next_u64() % o.frame.n_layers);
        size_t i = size_t(trng.next_u64() % o.h.at(r, lt).size());
        auto fd_h = [&](cplx delta) {
            ChannelTensor hp = o.h, hm = o.h;
            hp.at(r, lt)[i] += delta;
            hm.at(r, lt)[i] -= delta;
            return (loglik_h(o, hp, s.alpha, s.sigma, nv, lt) -
                    loglik_h(o, hm, s.alpha, s.sigma, nv, lt)) /
                   (2 * step);
        };
        cplx fd(fd_h(cplx(step, 0)), fd_h(cplx(0, step)));
        worst_fd = std::max(worst_fd, std::abs(fd - 2.0 * gh.at(r, lt)[i]) /
                                          std::max(1e-12, std::abs(2.0 * gh.at(r, lt)[i])));
        size_t j = size_t(trng.next_u64() % o.d[lt].size());
        auto fd_d = [&](cplx delta) {
            LayerGrids dp = o.d, dm = o.d;
            dp[lt][j] += delta;
            dm[lt][j] -= delta;
            return (loglik_d(o, dp, s.alpha, s.sigma, nv, lt) -
                    loglik_d(o, dm, s.alpha, s.sigma, nv, lt)) /
                   (2 * step);
        };
        cplx fdd(fd_d(cplx(step, 0)), fd_d(cplx(0, step)));
        worst_fd = std::max(worst_fd, std::abs(fdd - 2.0 * gd[lt][j]) /
                                          std::max(1e-12, std::abs(2.0 * gd[lt][j])));
    }

    double worst_form = 0;
    Probe o = random_probe(9300, 2, 1);
    for (double t = 0.05; t < 0.951; t += 0.05) {
        ChannelTensor s1 = likelihood_score_h(o.h, o.d, o.y, o.p, o.pc, t, nv);
        ChannelTensor s2 = likelihood_score_h_literal(o.h, o.d, o.y, o.p, o.pc, t, nv);
        LayerGrids d1 = likelihood_score_d(o.h, o.d, o.y, o.p, o.pc, t, nv);
        LayerGrids d2 = likelihood_score_d_literal(o.h, o.d, o.y, o.p, o.pc, t, nv);
        double num = 0, den = 0;
        for (size_t k = 0; k < s1.slices.size(); ++k)
            for (size_t i = 0; i < s1.slices[k].size(); ++i) {
                num += std::norm(s1.slices[k][i] - s2.slices[k][i]);
                den += std::norm(s2.slices[k][i]);
            }
        for (size_t i = 0; i < d1[0].size(); ++i) {
            num += std::norm(d1[0][i] - d2[0][i]);
            den += std::norm(d2[0][i]);
        }
        worst_form = std::max(worst_form, std::sqrt(num / den));
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = worst_fd < 1e-4 && worst_form < 1e-10 && secs < 10.0;
    return {pass, "fd err " + fmt(worst_fd) + ", form err " + fmt(worst_form) + ", " + fmt(secs) + " s"};
}

// ---------------------------------------------------------------------------
// criterion 2: pilot-only Gaussian posterior oracle
// ---------------------------------------------------------------------------
Outcome criterion2() {
    FrameConfig f{48, 12, 1, 1};  // posterior factorizes per rx antenna
    ChannelProfile prof = ChannelProfile::desk_default();
    ChannelStats stats = oracle_covariance(prof, f);
    GaussianChannelPrior prior(stats);
    Constellation qpsk = build_constellation(2, ModFamily::QAM);
    PilotConfig pc = PilotConfig::sip(f, 0.0);
    const double nv = 0.1;
    const int n_frames = 8, n_seeds = 200;

    std::vector<double> mean_match(n_frames), err_energy(n_frames), ch_energy(n_frames),
        post_energy(n_frames);
    parallel_frames(n_frames, [&](size_t fr) {
        uint64_t seed = mix_seed(9400, fr);
        ChannelTensor h = generate_channel(prof, f, mix_seed(seed, 1));
        LayerGrids p = generate_pilots(f, mix_seed(seed, 2));
        LayerGrids d{ComplexGrid(48, 12)};
        NoiseModel nm;
        nm.variance = nv;
        std::vector<ComplexGrid> y =
            apply_channel_and_noise(compose_transmit(d, p, pc), h, nm, mix_seed(seed, 3));
        ComplexGrid yw(48, 12);
        for (size_t i = 0; i < yw.size(); ++i) yw[i] = y[0][i] / p[0][i];
        ComplexGrid post = prior.posterior_mean(yw, nv);

        SamplerConfig cfg;
        cfg.steps = 100;
        cfg.corrector_iters = 5;
        cfg.noise_var = nv;
        ComplexGrid avg(48, 12);
        for (int s = 0; s < n_seeds; ++s) {
            cfg.seed = mix_seed(seed, 100 + s);
            CfmRxResult r = run_cfm_rx(y, p, pc, prior, qpsk, f, cfg);
            for (size_t i = 0; i < avg.size(); ++i) avg[i] += r.h0.at(0, 0)[i] / double(n_seeds);
        }
        double num = 0, den = 0, err = 0, hn = 0, perr = 0;
        for (size_t i = 0; i < avg.size(); ++i) {
            num += std::norm(avg[i] - post[i]);
            den += std::norm(post[i]);
            err += std::norm(avg[i] - h.at(0, 0)[i]);
            perr += std::norm(post[i] - h.at(0, 0)[i]);
            hn += std::norm(h.at(0, 0)[i]);
        }
        mean_match[fr] = std::sqrt(num / den);
        err_energy[fr] = err;
        post_energy[fr] = perr;
        ch_energy[fr] = hn;
    });

    // Pooled over frames (the frame energy of this highly correlated channel
    // is heavy-tailed), and compared against the error the exact posterior
    // estimator realizes on the same frames; its expectation is the analytic
    // MMSE, reported alongside.
    double worst_match = 0, err_acc = 0, ch_acc = 0, post_acc = 0;
    for (int fr = 0; fr < n_frames; ++fr) {
        worst_match = std::max(worst_match, mean_match[fr]);
        err_acc += err_energy[fr];
        post_acc += post_energy[fr];
        ch_acc += ch_energy[fr];
    }
    double nmse = 10.0 * std::log10(err_acc / ch_acc);
    double closed_realized = 10.0 * std::log10(post_acc / ch_acc);
    double mmse_expected = 10.0 * std::log10(prior.normalized_mmse(nv));
    bool pass = worst_match < 0.05 && std::abs(nmse - closed_realized) < 1.0;
    return {pass, "mean match " + fmt(100 * worst_match) + "%, sampler " + fmt(nmse) +
                      " dB vs closed form " + fmt(closed_realized) + " dB (analytic " +
                      fmt(mmse_expected) + " dB)"};
}

// ---------------------------------------------------------------------------
// criterion 3: unconditional flow fidelity
// ---------------------------------------------------------------------------
Outcome criterion3() {
    FrameConfig f{16, 4, 1, 1};
    ChannelProfile prof = ChannelProfile::exponential(4, 250e-9, 300e-9, 15e3, 0.9);
    ChannelStats st = oracle_covariance(prof, f);
    GaussianChannelPrior prior(st);

    const int dim = 64;
    Eigen::MatrixXcd cfull(dim, dim);
    for (int ct = 0; ct < 4; ++ct)
        for (int rt = 0; rt < 4; ++rt)
            for (int cf = 0; cf < 16; ++cf)
                for (int rf = 0; rf < 16; ++rf)
                    cfull(rt * 16 + rf, ct * 16 + cf) = st.time_cov(rt, ct) * st.freq_cov(rf, cf);

    const int steps = 200, draws = 10000;
    const unsigned threads = 2;
    std::vector<Eigen::MatrixXcd> accs(threads, Eigen::MatrixXcd::Zero(dim, dim));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            Eigen::VectorXcd xv(dim);
            for (int k = int(w); k < draws; k += int(threads)) {
                Rng rng(mix_seed(9500, k));
                ComplexGrid x(16, 4);
                rng.fill_cgauss(x);
                for (int i = steps; i >= 1; --i) {
                    double t = double(i) / steps;
                    ComplexGrid v = prior.velocity(x, t);
                    for (size_t j = 0; j < x.size(); ++j) x[j] -= v[j] / double(steps);
                }
                for (int n = 0; n < 4; ++n)
                    for (int s = 0; s < 16; ++s) xv[n * 16 + s] = x(s, n);
                accs[w].noalias() += xv * xv.adjoint();
            }
        });
    for (auto& th : pool) th.join();
    Eigen::MatrixXcd acc = accs[0];
    for (unsigned w = 1; w < threads; ++w) acc += accs[w];
    acc /= double(draws);
    double rel = (acc - cfull).norm() / cfull.norm();
    return {rel < 0.05, "covariance Frobenius error " + fmt(100 * rel) + "%"};
}

// ---------------------------------------------------------------------------
// criterion 4: Tweedie denoiser
// ---------------------------------------------------------------------------
Outcome criterion4() {
    Constellation bpsk = build_constellation(1, ModFamily::PSK);
    ComplexGrid d(1, 1);
    d[0] = cplx(0.25, 0.0);
    double wp = std::exp(-std::norm(d[0] - 0.5 * bpsk.points[0]) / 0.5);
    double wm = std::exp(-std::norm(d[0] - 0.5 * bpsk.points[1]) / 0.5);
    double brute = (wp * bpsk.points[0].real() + wm * bpsk.points[1].real()) / (wp + wm);
    double got = constellation_posterior_mean(d, 0.5, 0.5, bpsk)[0].real();
    bool probe_ok = std::abs(got - brute) < 1e-12 && std::abs(got - 0.4621) < 1e-3;

    bool snap_ok = true;
    for (int order = 1; order <= 4; ++order) {
        Constellation c = build_constellation(order, ModFamily::PSK);
        Rng rng(mix_seed(9600, order));
        ComplexGrid probe(4, 4);
        rng.fill_cgauss(probe);
        ComplexGrid snapped = constellation_posterior_mean(probe, 0.7, 0.0, c);
        for (size_t i = 0; i < probe.size(); ++i) {
            double best = 1e300;
            cplx bp = 0;
            for (const cplx& pt : c.points) {
                double dist = std::norm(probe[i] - 0.7 * pt);
                if (dist < best) {
                    best = dist;
                    bp = pt;
                }
            }
            if (snapped[i] != bp) snap_ok = false;
        }
    }
    return {probe_ok && snap_ok, "probe " + fmt(got) + " (oracle " + fmt(brute) + "), snap " +
                                     (snap_ok ? "exact" : "broken")};
}

// ---------------------------------------------------------------------------
// shared operating-point sweep for criteria 5, 6 and 8
// ---------------------------------------------------------------------------
const SweepResult& operating_point_sweep() {
    static SweepResult cached = [] {
        SimConfig cfg;
        cfg.sweep.schemes = {"SIP"};
        cfg.sweep.frames_per_node = 200;
        cfg.sweep.threads = 0;
        return run_sweep(cfg, 20260808);
    }();
    return cached;
}

std::vector<double> node_bers(const SweepResult& res, const std::string& receiver, double snr) {
    const NodeFrames* node = res.find("SIP", receiver, snr);
    std::vector<double> out;
    if (!node) return out;
    for (const FrameMetrics& fm : node->frames) out.push_back(fm.ber);
    return out;
}

Outcome criterion5() {
    const SweepResult& res = operating_point_sweep();
    const std::vector<double> snrs{-10, -5, 0, 5, 10, 15, 20};

    std::string detail;
    bool nmse_ok = true;
    for (double snr : {10.0, 15.0, 20.0}) {
        double cfm = 0, lm = 0;
        for (const MetricRecord& r : res.records)
            if (r.scheme == "SIP" && r.snr_db == snr) {
                if (r.receiver == "CFM-Rx") cfm = r.nmse_db;
                if (r.receiver == "LMMSE-O") lm = r.nmse_db;
            }
        if (cfm > lm + 3.0) nmse_ok = false;
        detail += fmt(snr) + "dB:" + fmt(cfm) + "/" + fmt(lm) + " ";
    }

    bool monotone_ok = true;
    for (size_t i = 0; i + 1 < snrs.size(); ++i) {
        std::vector<double> lo = node_bers(res, "CFM-Rx", snrs[i]);
        std::vector<double> hi = node_bers(res, "CFM-Rx", snrs[i + 1]);
        auto [ci_lo, ci_hi] = paired_diff_ci(lo, hi, mix_seed(9700, i));
        (void)ci_lo;
        if (ci_hi < 0.0) monotone_ok = false;  // significantly increasing
    }
    return {nmse_ok && monotone_ok,
            detail + (monotone_ok ? "BER monotone" : "BER monotonicity violated")};
}

Outcome criterion6() {
    const SweepResult& res = operating_point_sweep();
    bool ok = true;
    std::string detail;
    for (double snr : {-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0}) {
        std::vector<double> rx = node_bers(res, "CFM-Rx", snr);
        std::vector<double> teq = node_bers(res, "CFM-TEQ", snr);
        auto [lo, hi] = paired_diff_ci(teq, rx, mix_seed(9800, uint64_t(snr + 100)));
        (void)lo;
        if (hi < 0.0) ok = false;  // CFM-Rx significantly worse than CFM-TEQ
        double mrx = 0, mteq = 0;
        for (double v : rx) mrx += v;
        for (double v : teq) mteq += v;
        detail += fmt(mrx / rx.size()) + "<=" + fmt(mteq / teq.size()) + " ";
    }
    return {ok, detail};
}

// ---------------------------------------------------------------------------
// criterion 7: convergence plateau
// ---------------------------------------------------------------------------
Outcome criterion7() {
    SimConfig cfg;
    cfg.sweep.schemes = {"SIP"};
    cfg.sweep.receivers = {"CFM-Rx"};
    cfg.sweep.snr_db = {5.0};
    cfg.sweep.frames_per_node = 300;
    cfg.sweep.threads = 0;

    cfg.sampler.steps = 30;
    SweepResult r30 = run_sweep(cfg, 20260808);
    cfg.sampler.steps = 100;
    SweepResult r100 = run_sweep(cfg, 20260808);
    double b30 = r30.records.at(0).ber;
    double b100 = r100.records.at(0).ber;
    double rel = std::abs(b30 / std::max(b100, 1e-12) - 1.0);
    return {rel < 0.10, "BER(T=30) " + fmt(b30) + " vs BER(T=100) " + fmt(b100) + ", rel " +
                            fmt(100 * rel) + "%"};
}

Outcome criterion8() {
    const SweepResult& res = operating_point_sweep();
    SimConfig cfg;  // for the closed-form reference
    ChannelStats stats = oracle_covariance(cfg.profile.build(), cfg.frame);
    PilotConfig pc = PilotConfig::sip(cfg.frame, 0.9);

    // pooled ratio: consistent estimator of the moment ratio the closed form
    // expresses, unlike the Jensen-offset per-frame ratio average
    auto pooled_db = [&](const std::string& receiver, double snr) {
        const NodeFrames* node = res.find("SIP", receiver, snr);
        double num = 0, den = 0;
        for (const FrameMetrics& fm : node->frames) {
            num += fm.nmse_ratio * fm.channel_energy;
            den += fm.channel_energy;
        }
        return 10.0 * std::log10(num / den);
    };

    bool order_ok = true, mmse_ok = true;
    std::string detail;
    for (double snr : {-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0}) {
        double ls = pooled_db("LS", snr);
        double lp = pooled_db("LMMSE-P", snr);
        double lo = pooled_db("LMMSE-O", snr);
        // orderings within narrow bootstrap bands collapse to point checks
        // here because the estimators differ by construction, not chance
        if (!(ls >= lp - 0.2 && lp >= lo - 0.2)) order_ok = false;
        LmmseContext ctx(stats, pc, NoiseModel::from_snr_db(snr).variance);
        double closed = 10.0 * std::log10(ctx.normalized_mmse());
        if (std::abs(lo - closed) > 0.5) mmse_ok = false;
        detail += fmt(snr) + ":" + fmt(ls) + ">=" + fmt(lp) + ">=" + fmt(lo) + "(cf " +
                  fmt(closed) + ") ";
    }
    return {order_ok && mmse_ok, detail};
}

// ---------------------------------------------------------------------------
// criterion 9: throughput arithmetic
// ---------------------------------------------------------------------------
Outcome criterion9() {
    ThroughputParams tp;
    tp.slots_per_second = 1000;
    tp.res_per_slot = 576;
    tp.data_fraction = 1.0;
    tp.code_rate = 1.0;
    tp.bits_per_symbol = 2;
    double sip = throughput_bps(tp, 0.0);
    ThroughputParams op = tp;
    op.data_fraction = 11.0 / 12.0;
    double ratio = sip / throughput_bps(op, 0.0);
    bool pass = sip == 1.152e6 && std::abs(ratio - 12.0 / 11.0) < 1e-3 * (12.0 / 11.0);
    return {pass, "R = " + fmt(sip) + " bit/s, SIP/OP ratio " + fmt(ratio)};
}

// ---------------------------------------------------------------------------
// criterion 10: trained-prior parity
// ---------------------------------------------------------------------------
Outcome criterion10() {
    auto start = std::chrono::steady_clock::now();
    SimConfig cfg;
    ChannelProfile prof = cfg.profile.build();
    FrameConfig f = cfg.frame;

    ChannelDataset ds;
    ds.frame = f;
    ds.profile_hash = prof.hash();
    ds.seed = 424242;
    ds.samples.reserve(cfg.training.dataset_samples);
    for (int k = 0; k < cfg.training.dataset_samples; ++k)
        ds.samples.push_back(
            generate_channel(prof, f, mix_seed(mix_seed(ds.seed, tag::kChannel), k)));

    TrainReport report;
    VelocityNet net = train_velocity_net(ds, cfg.training.net, cfg.training.train, 424242, &report);
    double train_secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    GaussianChannelPrior prior(oracle_covariance(prof, f));
    auto grids = ds.all_grids();
    Rng rng(9900);
    double worst_parity = 0;
    for (double t : {0.2, 0.5, 0.8}) {
        double num = 0, den = 0;
        for (int k = 0; k < 200; ++k) {
            const ComplexGrid& h0 = *grids[k];
            ComplexGrid xt(f.n_subcarriers, f.n_symbols);
            for (size_t i = 0; i < xt.size(); ++i) xt[i] = (1 - t) * h0[i] + t * rng.cgauss();
            ComplexGrid va = prior.velocity(xt, t);
            ComplexGrid vn = net.velocity(xt, t);
            for (size_t i = 0; i < xt.size(); ++i) {
                num += std::norm(vn[i] - va[i]);
                den += std::norm(va[i]);
            }
        }
        worst_parity = std::max(worst_parity, std::sqrt(num / den));
    }

    // backend swap at the operating point: gaussian vs trained net
    const std::string weights_path = "/tmp/cfmrx_acceptance_weights.bin";
    net.save(weights_path, cfg.training.train.hash());
    SimConfig sweep_cfg;
    sweep_cfg.sweep.schemes = {"SIP"};
    sweep_cfg.sweep.receivers = {"CFM-Rx"};
    sweep_cfg.sweep.snr_db = {10.0, 15.0, 20.0};
    sweep_cfg.sweep.frames_per_node = 100;
    sweep_cfg.sweep.threads = 0;
    SweepResult gauss = run_sweep(sweep_cfg, 20260808);
    sweep_cfg.sweep.prior = "net";
    sweep_cfg.sweep.weights_path = weights_path;
    SweepResult swapped = run_sweep(sweep_cfg, 20260808);
    double worst_degradation = -1e9;
    for (size_t i = 0; i < gauss.records.size(); ++i)
        worst_degradation =
            std::max(worst_degradation, swapped.records[i].nmse_db - gauss.records[i].nmse_db);

    double total_secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = worst_parity < 0.15 && worst_degradation < 2.0 && train_secs < 1200.0;
    return {pass, "parity " + fmt(100 * worst_parity) + "%, swap degradation " +
                      fmt(worst_degradation) + " dB, train " + fmt(train_secs) + " s, total " +
                      fmt(total_secs) + " s"};
}

// ---------------------------------------------------------------------------
// criterion 11: sweep determinism
// ---------------------------------------------------------------------------
Outcome criterion11() {
    SimConfig cfg;
    cfg.frame = FrameConfig{16, 6, 2, 1};
    cfg.profile.n_taps = 4;
    cfg.sweep.snr_db = {0.0, 10.0};
    cfg.sweep.frames_per_node = 15;
    cfg.sweep.covariance_snapshots = 25;
    cfg.sweep.threads = 2;

    auto emit = [&](const std::string& path) {
        SweepResult r = run_sweep(cfg, 31415);
        write_metrics_csv(path, r.records);
        std::ifstream is(path, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    };
    std::string a = emit("/tmp/cfmrx_det1.csv");
    std::string b = emit("/tmp/cfmrx_det2.csv");
    return {!a.empty() && a == b, a == b ? "byte-identical CSV" : "CSV bytes differ"};
}

struct Criterion {
    int id;
    const char* name;
    Outcome (*fn)();
};

const Criterion kCriteria[] = {
    {1, "likelihood scores match finite differences; stabilized equals literal", criterion1},
    {2, "pilot-only sampler reproduces the Gaussian posterior", criterion2},
    {3, "reverse ODE reproduces the prior covariance", criterion3},
    {4, "Tweedie denoiser probe and zero-noise snap", criterion4},
    {5, "operating point: NMSE within 3 dB of LMMSE-O at high SNR, monotone BER", criterion5},
    {6, "joint receiver at least as good as the two-stage pipeline", criterion6},
    {7, "BER plateau: T=30 within 10% of T=100 at SNR 5", criterion7},
    {8, "baseline sanity: LS >= LMMSE-P >= LMMSE-O, oracle matches closed form", criterion8},
    {9, "throughput formula exact; SIP/OP ratio 12/11", criterion9},
    {10, "trained prior parity and backend swap", criterion10},
    {11, "sweep is byte-deterministic in the master seed", criterion11},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
        if (std::strcmp(argv[i], "--list") == 0) {
            for (const Criterion& c : kCriteria) std::printf("%2d  %s\n", c.id, c.name);
            return 0;
        }
    }
    int failures = 0;
    for (const Criterion& c : kCriteria) {
        if (only != 0 && c.id != only) continue;
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %d: %s (%s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name,
                    out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
