#include "cfmrx/validation.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "cfmrx/baselines.hpp"
#include "cfmrx/prior.hpp"
#include "cfmrx/rng.hpp"
#include "cfmrx/sampler.hpp"
#include "cfmrx/schedule.hpp"
#include "cfmrx/transmit.hpp"

namespace cfmrx {

namespace {

struct Probe {
    FrameConfig frame;
    PilotConfig pc;
    Constellation con;
    ChannelTensor h;
    LayerGrids d;
    LayerGrids p;
    std::vector<ComplexGrid> y;
    double noise_var = 0.1;
};

Probe random_probe(uint64_t seed, int n_rx = 2, int n_layers = 1) {
    Probe pr;
    pr.frame = FrameConfig{4, 3, n_rx, n_layers};
    pr.pc = PilotConfig::sip(pr.frame, 0.9);
    pr.con = build_constellation(2, ModFamily::QAM);
    Rng rng(seed);
    pr.h = ChannelTensor(n_rx, n_layers, 4, 3);
    for (auto& g : pr.h.slices) rng.fill_cgauss(g, 1.0);
    for (int l = 0; l < n_layers; ++l) {
        ComplexGrid g(4, 3);
        rng.fill_cgauss(g, 1.0);
        pr.d.push_back(g);
    }
    pr.p = generate_pilots(pr.frame, mix_seed(seed, 7));
    for (int r = 0; r < n_rx; ++r) {
        ComplexGrid g(4, 3);
        rng.fill_cgauss(g, 1.0);
        pr.y.push_back(g);
    }
    return pr;
}

// Coordinate-wise Gaussian log-density whose gradient with respect to layer
// `lt` of H is the stabilized likelihood score for that layer.
double loglik_h(const Probe& pr, const ChannelTensor& h, double alpha, double sigma, int lt) {
    LayerGrids a = composite_symbols(pr.d, pr.p, pr.pc);
    double acc = 0;
    for (int r = 0; r < pr.frame.n_rx; ++r)
        for (size_t i = 0; i < pr.y[r].size(); ++i) {
            cplx res = alpha * pr.y[r][i];
            for (int l = 0; l < pr.frame.n_layers; ++l) res -= h.at(r, l)[i] * a[l][i];
            double den = alpha * alpha * pr.noise_var + sigma * sigma * std::norm(a[lt][i]);
            acc += -std::norm(res) / den;
        }
    return acc;
}

double loglik_d(const Probe& pr, const LayerGrids& d, double alpha, double sigma, int lt) {
    LayerGrids a = composite_symbols(d, pr.p, pr.pc);
    double acc = 0;
    const double ad = pr.pc.data_amp;
    for (int r = 0; r < pr.frame.n_rx; ++r)
        for (size_t i = 0; i < pr.y[r].size(); ++i) {
            cplx res = alpha * pr.y[r][i];
            for (int l = 0; l < pr.frame.n_layers; ++l) res -= pr.h.at(r, l)[i] * a[l][i];
            double den =
                alpha * alpha * pr.noise_var + ad * ad * sigma * sigma * std::norm(pr.h.at(r, lt)[i]);
            acc += -std::norm(res) / den;
        }
    return acc;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

std::vector<CheckResult> run_validation(uint64_t seed) {
    std::vector<CheckResult> out;
    auto check = [&out](const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
        CheckResult r;
        r.name = name;
        try {
            auto [ok, detail] = fn();
            r.pass = ok;
            r.detail = detail;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        out.push_back(std::move(r));
    };

    check("schedule moment identity g^2 = 2 sigma (dsigma - a sigma)", [&] {
        double worst = 0;
        for (double t : {0.05, 0.2, 0.5, 0.8, 0.95}) {
            ScheduleSample s = ot_schedule().at(t);
            double lhs = s.diffusion * s.diffusion;
            double rhs = 2.0 * s.sigma * (s.dsigma - s.drift * s.sigma);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        return std::make_pair(worst < 1e-12, "max abs err " + fmt(worst));
    });

    check("OT conditional velocity is x1 - x0 at every t", [&] {
        Rng rng(mix_seed(seed, 1));
        double worst = 0;
        for (int k = 0; k < 32; ++k) {
            cplx x0 = rng.cgauss(), x1 = rng.cgauss();
            for (double t : {0.1, 0.5, 0.9}) {
                ScheduleSample s = ot_schedule().at(t);
                cplx v = s.dalpha * x0 + s.dsigma * x1;
                worst = std::max(worst, std::abs(v - (x1 - x0)));
            }
        }
        return std::make_pair(worst < 1e-12, "max abs err " + fmt(worst));
    });

    check("forward interpolation has mean alpha*x0 and variance sigma^2", [&] {
        Rng rng(mix_seed(seed, 2));
        const double t = 0.6;
        ScheduleSample s = ot_schedule().at(t);
        const cplx x0(0.7, -0.3);
        const int n = 200000;
        cplx mean = 0;
        double var = 0;
        for (int i = 0; i < n; ++i) {
            cplx xt = s.alpha * x0 + s.sigma * rng.cgauss();
            mean += xt;
            var += std::norm(xt - s.alpha * x0);
        }
        mean /= double(n);
        var /= double(n);
        bool ok = std::abs(mean - s.alpha * x0) < 0.01 && std::abs(var / (s.sigma * s.sigma) - 1.0) < 0.01;
        return std::make_pair(ok, "var ratio " + fmt(var / (s.sigma * s.sigma)));
    });

    check("transmit energy is unit for SIP and OP", [&] {
        FrameConfig f{48, 12, 1, 1};
        Constellation con = build_constellation(2, ModFamily::QAM);
        double worst = 0;
        for (PilotScheme scheme : {PilotScheme::SIP, PilotScheme::OP}) {
            PilotConfig pc = scheme == PilotScheme::SIP ? PilotConfig::sip(f, 0.9) : PilotConfig::op(f, 0);
            double acc = 0;
            size_t res = 0;
            for (int rep = 0; rep < 20; ++rep) {
                Rng rng(mix_seed(seed, 100 + rep));
                std::vector<uint8_t> bits(f.res_per_frame() * 2);
                for (auto& b : bits) b = uint8_t(rng.next_u64() & 1);
                LayerGrids d{modulate_bits(bits, con, f.n_subcarriers, f.n_symbols)};
                LayerGrids p = generate_pilots(f, mix_seed(seed, 200 + rep));
                LayerGrids x = compose_transmit(d, p, pc);
                acc += x[0].squared_norm();
                res += x[0].size();
            }
            worst = std::max(worst, std::abs(acc / double(res) - 1.0));
        }
        return std::make_pair(worst < 0.02, "max power err " + fmt(worst));
    });

    check("hard_demap inverts modulate_bits on clean grids", [&] {
        for (auto [order, family] : std::vector<std::pair<int, ModFamily>>{
                 {1, ModFamily::PSK}, {2, ModFamily::QAM}, {3, ModFamily::PSK}, {4, ModFamily::PSK}}) {
            Constellation c = build_constellation(order, family);
            Rng rng(mix_seed(seed, 300 + order));
            std::vector<uint8_t> bits(size_t(order) * 12);
            for (auto& b : bits) b = uint8_t(rng.next_u64() & 1);
            ComplexGrid g = modulate_bits(bits, c, 4, 3);
            if (hard_demap(g, c) != bits) return std::make_pair(false, "order " + fmt(order));
        }
        return std::make_pair(true, std::string("orders 1..4"));
    });

    check("Gaussian prior stable form equals drift - kappa*score", [&] {
        Rng rng(mix_seed(seed, 3));
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) a(i, j) = rng.cgauss();
        ChannelStats st;
        st.freq_cov = a * a.adjoint() / 4.0 + 0.1 * Eigen::MatrixXcd::Identity(4, 4);
        st.time_cov = Eigen::MatrixXcd::Identity(3, 3);
        GaussianChannelPrior prior(st);
        ComplexGrid x(4, 3);
        rng.fill_cgauss(x, 1.0);
        double worst = 0;
        for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            ComplexGrid v1 = prior.velocity(x, t);
            ComplexGrid v2 = prior.velocity_literal(x, t);
            double num = 0, den = 0;
            for (size_t i = 0; i < v1.size(); ++i) {
                num += std::norm(v1[i] - v2[i]);
                den += std::norm(v2[i]);
            }
            worst = std::max(worst, std::sqrt(num / den));
        }
        return std::make_pair(worst < 1e-10, "max rel err " + fmt(worst));
    });

    check("Tweedie posterior mean matches brute force on BPSK probe", [&] {
        Constellation bpsk = build_constellation(1, ModFamily::PSK);
        ComplexGrid d(1, 1);
        d[0] = cplx(0.25, 0.0);
        ComplexGrid e = constellation_posterior_mean(d, 0.5, 0.5, bpsk);
        double wp = std::exp(-std::norm(d[0] - cplx(0.5)) / (2 * 0.25));
        double wm = std::exp(-std::norm(d[0] + cplx(0.5)) / (2 * 0.25));
        double oracle = (wp - wm) / (wp + wm);
        bool ok = std::abs(e[0].real() - oracle) < 1e-12 && std::abs(oracle - 0.4621) < 1e-3;
        return std::make_pair(ok, "value " + fmt(e[0].real()));
    });

    check("Tweedie identity: finite-difference score of the mixture density", [&] {
        Constellation qpsk = build_constellation(2, ModFamily::QAM);
        const double alpha = 0.7, sig = 0.4;
        auto logp = [&](cplx x) {
            double m = -1e300;
            std::vector<double> lw;
            for (const cplx& pt : qpsk.points) {
                double w = -std::norm(x - alpha * pt) / (2 * sig * sig);
                lw.push_back(w);
                m = std::max(m, w);
            }
            double acc = 0;
            for (double w : lw) acc += std::exp(w - m);
            return m + std::log(acc);
        };
        Rng rng(mix_seed(seed, 4));
        double worst = 0;
        for (int k = 0; k < 20; ++k) {
            cplx x = rng.cgauss();
            const double h = 1e-6;
            double gre = (logp(x + h) - logp(x - h)) / (2 * h);
            double gim = (logp(x + cplx(0, h)) - logp(x - cplx(0, h))) / (2 * h);
            ComplexGrid d(1, 1);
            d[0] = x;
            ComplexGrid e = constellation_posterior_mean(d, alpha, sig, qpsk);
            cplx analytic = (alpha * e[0] - x) / (sig * sig);
            worst = std::max(worst, std::abs(cplx(gre, gim) - analytic) / std::abs(analytic));
        }
        return std::make_pair(worst < 1e-4, "max rel err " + fmt(worst));
    });

    check("constellation velocity literal equals (D - E)/t", [&] {
        Constellation qpsk = build_constellation(2, ModFamily::QAM);
        Rng rng(mix_seed(seed, 5));
        ComplexGrid d(3, 2);
        rng.fill_cgauss(d, 1.0);
        double worst = 0;
        for (double t : {0.1, 0.4, 0.8}) {
            ComplexGrid v1 = constellation_prior_velocity(d, t, qpsk);
            ComplexGrid v2 = constellation_prior_velocity_literal(d, ot_schedule().at(t), qpsk);
            double num = 0, den = 0;
            for (size_t i = 0; i < d.size(); ++i) {
                num += std::norm(v1[i] - v2[i]);
                den += std::norm(v2[i]);
            }
            worst = std::max(worst, std::sqrt(num / den));
        }
        return std::make_pair(worst < 1e-10, "max rel err " + fmt(worst));
    });

    check("likelihood scores: stabilized equals literal away from t=1", [&] {
        Probe pr = random_probe(mix_seed(seed, 6));
        double worst = 0;
        for (double t = 0.05; t <= 0.951; t += 0.05) {
            ChannelTensor s1 = likelihood_score_h(pr.h, pr.d, pr.y, pr.p, pr.pc, t, pr.noise_var);
            ChannelTensor s2 = likelihood_score_h_literal(pr.h, pr.d, pr.y, pr.p, pr.pc, t, pr.noise_var);
            LayerGrids d1 = likelihood_score_d(pr.h, pr.d, pr.y, pr.p, pr.pc, t, pr.noise_var);
            LayerGrids d2 = likelihood_score_d_literal(pr.h, pr.d, pr.y, pr.p, pr.pc, t, pr.noise_var);
            double num = 0, den = 0;
            for (size_t k = 0; k < s1.slices.size(); ++k)
                for (size_t i = 0; i < s1.slices[k].size(); ++i) {
                    num += std::norm(s1.slices[k][i] - s2.slices[k][i]);
                    den += std::norm(s2.slices[k][i]);
                }
            for (size_t l = 0; l < d1.size(); ++l)
                for (size_t i = 0; i < d1[l].size(); ++i) {
                    num += std::norm(d1[l][i] - d2[l][i]);
                    den += std::norm(d2[l][i]);
                }
            worst = std::max(worst, std::sqrt(num / den));
        }
        return std::make_pair(worst < 1e-10, "max rel err " + fmt(worst));
    });

    check("likelihood scores match finite differences of the log-densities", [&] {
        double worst = 0;
        for (int probe = 0; probe < 20; ++probe) {
            Probe pr = random_probe(mix_seed(seed, 700 + probe));
            Rng trng(mix_seed(seed, 800 + probe));
            double t = 0.1 + 0.8 * trng.uniform();
            ScheduleSample s = ot_schedule().at(t);
            ChannelTensor gh = likelihood_score_h(pr.h, pr.d, pr.y, pr.p, pr.pc, t, pr.noise_var);
            LayerGrids gd = likelihood_score_d(pr.h, pr.d, pr.y, pr.p, pr.pc, t, pr.noise_var);
            const double step = 1e-6;
            // one random coordinate of H and one of D per probe
            int r = int(trng.next_u64() % pr.frame.n_rx);
            size_t i = size_t(trng.next_u64() % pr.h.at(r, 0).size());
            auto fd_h = [&](cplx delta) {
                ChannelTensor hp = pr.h, hm = pr.h;
                hp.at(r, 0)[i] += delta;
                hm.at(r, 0)[i] -= delta;
                return (loglik_h(pr, hp, s.alpha, s.sigma, 0) - loglik_h(pr, hm, s.alpha, s.sigma, 0)) /
                       (2 * step);
            };
            cplx fd(fd_h(cplx(step, 0)), fd_h(cplx(0, step)));
            cplx analytic = 2.0 * gh.at(r, 0)[i];  // d/dRe + i d/dIm = 2 * d/dconj
            worst = std::max(worst, std::abs(fd - analytic) / std::max(1e-12, std::abs(analytic)));

            size_t j = size_t(trng.next_u64() % pr.d[0].size());
            auto fd_d = [&](cplx delta) {
                LayerGrids dp = pr.d, dm = pr.d;
                dp[0][j] += delta;
                dm[0][j] -= delta;
                return (loglik_d(pr, dp, s.alpha, s.sigma, 0) - loglik_d(pr, dm, s.alpha, s.sigma, 0)) /
                       (2 * step);
            };
            cplx fdd(fd_d(cplx(step, 0)), fd_d(cplx(0, step)));
            cplx analyticd = 2.0 * gd[0][j];
            worst = std::max(worst, std::abs(fdd - analyticd) / std::max(1e-12, std::abs(analyticd)));
        }
        return std::make_pair(worst < 1e-4, "max rel err " + fmt(worst));
    });

    check("corrector keeps the data-consistency residual non-increasing", [&] {
        FrameConfig f{16, 8, 2, 1};
        PilotConfig pc = PilotConfig::sip(f, 0.9);
        Constellation con = build_constellation(2, ModFamily::QAM);
        ChannelProfile prof = ChannelProfile::exponential(4, 150e-9, 300e-9, 15e3, 1.0);
        ChannelTensor h = generate_channel(prof, f, mix_seed(seed, 9));
        LayerGrids p = generate_pilots(f, mix_seed(seed, 10));
        Rng rng(mix_seed(seed, 11));
        std::vector<uint8_t> bits(f.res_per_frame() * 2);
        for (auto& b : bits) b = uint8_t(rng.next_u64() & 1);
        LayerGrids d{modulate_bits(bits, con, f.n_subcarriers, f.n_symbols)};
        NoiseModel nm = NoiseModel::from_snr_db(10);
        std::vector<ComplexGrid> y =
            apply_channel_and_noise(compose_transmit(d, p, pc), h, nm, mix_seed(seed, 12));

        GaussianChannelPrior prior(oracle_covariance(prof, f));
        SamplerConfig cfg;
        cfg.noise_var = nm.variance;
        cfg.seed = mix_seed(seed, 13);
        SamplerState state;
        state.t = 1.0;
        state.h = ChannelTensor(f.n_rx, f.n_layers, f.n_subcarriers, f.n_symbols);
        Rng irng(mix_seed(cfg.seed, tag::kSamplerInit));
        for (auto& g : state.h.slices) irng.fill_cgauss(g, 1.0);
        {
            ComplexGrid g(f.n_subcarriers, f.n_symbols);
            irng.fill_cgauss(g, 1.0);
            state.d.push_back(std::move(g));
        }
        const double eps = 1.0 / cfg.steps;
        double violations = 0;
        SamplerState kstate = state;
        double first = 0, last = 0;
        for (int i = cfg.steps; i >= 1; --i) {
            state.t = double(i) / cfg.steps;
            predictor_step(state, prior, con, eps);
            double before = denoised_residual(state, y, p, pc, prior, con);
            corrector_step(state, y, p, pc, prior, con, cfg);
            double after = denoised_residual(state, y, p, pc, prior, con);
            // symbol-decision jumps allow small transients in the default mode
            if (after > before * 1.05) violations += 1;
            if (i == cfg.steps) first = before;
            if (i == 1) last = after;
        }
        if (last > first) violations += 1;
        // the score-form corrector contracts the raw alpha-scaled residual
        SamplerConfig kcfg = cfg;
        kcfg.corrector_mode = CorrectorMode::kKappaScore;
        for (int i = kcfg.steps; i >= 1; --i) {
            kstate.t = double(i) / kcfg.steps;
            predictor_step(kstate, prior, con, eps);
            ScheduleSample sc = ot_schedule().at(kstate.t);
            double before = data_residual(kstate.h, kstate.d, y, p, pc, sc.alpha);
            corrector_step(kstate, y, p, pc, prior, con, kcfg);
            double after = data_residual(kstate.h, kstate.d, y, p, pc, sc.alpha);
            if (after > before * (1.0 + 1e-9)) violations += 1;
        }
        return std::make_pair(violations == 0, "violations " + fmt(violations));
    });

    check("sampler output is deterministic in (inputs, seed)", [&] {
        Probe pr = random_probe(mix_seed(seed, 14), 2, 1);
        ChannelProfile prof = ChannelProfile::exponential(2, 150e-9, 300e-9, 15e3, 1.0);
        FrameConfig f{4, 3, 2, 1};
        GaussianChannelPrior prior(oracle_covariance(prof, f));
        SamplerConfig cfg;
        cfg.steps = 10;
        cfg.noise_var = pr.noise_var;
        cfg.seed = mix_seed(seed, 15);
        CfmRxResult a = run_cfm_rx(pr.y, pr.p, pr.pc, prior, pr.con, f, cfg);
        CfmRxResult b = run_cfm_rx(pr.y, pr.p, pr.pc, prior, pr.con, f, cfg);
        bool same = a.bits == b.bits;
        for (size_t k = 0; same && k < a.h0.slices.size(); ++k)
            for (size_t i = 0; i < a.h0.slices[k].size(); ++i)
                if (a.h0.slices[k][i] != b.h0.slices[k][i]) {
                    same = false;
                    break;
                }
        return std::make_pair(same, std::string(same ? "bit-identical" : "differs"));
    });

    return out;
}

}  // namespace cfmrx
