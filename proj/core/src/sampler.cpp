#include "cfmrx/sampler.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cfmrx/rng.hpp"

namespace cfmrx {

namespace {

constexpr double kDenFloor = 1e-300;

ComplexGrid residual_grid(const ChannelTensor& h, const LayerGrids& a,
                          const ComplexGrid& y, int r, double alpha) {
    ComplexGrid res(y.rows(), y.cols());
    for (size_t i = 0; i < res.size(); ++i) res[i] = alpha * y[i];
    for (int l = 0; l < h.n_layers; ++l) {
        const ComplexGrid& hs = h.at(r, l);
        for (size_t i = 0; i < res.size(); ++i) res[i] -= hs[i] * a[l][i];
    }
    return res;
}

void check_obs_shapes(const ChannelTensor& h, const LayerGrids& d, const std::vector<ComplexGrid>& y,
                      const LayerGrids& p) {
    if (int(y.size()) != h.n_rx || int(d.size()) != h.n_layers || d.size() != p.size())
        throw std::invalid_argument("likelihood score: tensor extents disagree");
    for (const auto& g : y)
        if (!g.same_shape(h.at(0, 0))) throw std::invalid_argument("likelihood score: grid shapes disagree");
}

}  // namespace

void SamplerConfig::validate() const {
    if (steps < 1) throw std::invalid_argument("SamplerConfig: steps must be >= 1");
    if (corrector_iters < 0) throw std::invalid_argument("SamplerConfig: corrector iterations must be >= 0");
    if (!(corrector_scale > 0)) throw std::invalid_argument("SamplerConfig: corrector scale must be positive");
    if (!(noise_var > 0)) throw std::invalid_argument("SamplerConfig: noise variance must be positive");
}

LayerGrids composite_symbols(const LayerGrids& d, const LayerGrids& p, const PilotConfig& pc) {
    LayerGrids a;
    a.reserve(d.size());
    for (size_t l = 0; l < d.size(); ++l) {
        ComplexGrid g(d[l].rows(), d[l].cols());
        for (size_t i = 0; i < g.size(); ++i)
            g[i] = pc.data_amp * pc.data_mask[i] * d[l][i] + pc.pilot_amp * pc.pilot_mask[i] * p[l][i];
        a.push_back(std::move(g));
    }
    return a;
}

ChannelTensor likelihood_score_h(const ChannelTensor& h, const LayerGrids& d,
                                 const std::vector<ComplexGrid>& y, const LayerGrids& p,
                                 const PilotConfig& pc, double t, double noise_var,
                                 const Schedule& sched) {
    check_obs_shapes(h, d, y, p);
    ScheduleSample sc = sched.at(t);
    const double a2s2 = sc.alpha * sc.alpha * noise_var;
    const double sig2 = sc.sigma * sc.sigma;
    LayerGrids a = composite_symbols(d, p, pc);
    ChannelTensor score(h.n_rx, h.n_layers, h.at(0, 0).rows(), h.at(0, 0).cols());
    for (int r = 0; r < h.n_rx; ++r) {
        ComplexGrid res = residual_grid(h, a, y[r], r, sc.alpha);
        for (int l = 0; l < h.n_layers; ++l) {
            ComplexGrid& out = score.at(r, l);
            for (size_t i = 0; i < out.size(); ++i) {
                double den = a2s2 + sig2 * std::norm(a[l][i]);
                out[i] = den > kDenFloor ? std::conj(a[l][i]) * res[i] / den : cplx(0.0);
            }
        }
    }
    return score;
}

LayerGrids likelihood_score_d(const ChannelTensor& h, const LayerGrids& d,
                              const std::vector<ComplexGrid>& y, const LayerGrids& p,
                              const PilotConfig& pc, double t, double noise_var,
                              const Schedule& sched) {
    check_obs_shapes(h, d, y, p);
    ScheduleSample sc = sched.at(t);
    const double a2s2 = sc.alpha * sc.alpha * noise_var;
    const double ad2sig2 = pc.data_amp * pc.data_amp * sc.sigma * sc.sigma;
    LayerGrids a = composite_symbols(d, p, pc);
    LayerGrids score;
    score.reserve(d.size());
    for (size_t l = 0; l < d.size(); ++l) score.emplace_back(d[l].rows(), d[l].cols());
    for (int r = 0; r < h.n_rx; ++r) {
        ComplexGrid res = residual_grid(h, a, y[r], r, sc.alpha);
        for (int l = 0; l < h.n_layers; ++l) {
            const ComplexGrid& hs = h.at(r, l);
            ComplexGrid& out = score[l];
            for (size_t i = 0; i < out.size(); ++i) {
                double den = a2s2 + ad2sig2 * std::norm(hs[i]);
                if (den > kDenFloor)
                    out[i] += pc.data_amp * pc.data_mask[i] * std::conj(hs[i]) * res[i] / den;
            }
        }
    }
    return score;
}

ChannelTensor likelihood_score_h_literal(const ChannelTensor& h, const LayerGrids& d,
                                         const std::vector<ComplexGrid>& y, const LayerGrids& p,
                                         const PilotConfig& pc, double t, double noise_var,
                                         const Schedule& sched) {
    check_obs_shapes(h, d, y, p);
    ScheduleSample sc = sched.at(t);
    if (sc.alpha <= 0.0) throw std::invalid_argument("literal score: alpha must be positive");
    const double ratio2 = (sc.sigma / sc.alpha) * (sc.sigma / sc.alpha);
    LayerGrids a = composite_symbols(d, p, pc);
    ChannelTensor score(h.n_rx, h.n_layers, h.at(0, 0).rows(), h.at(0, 0).cols());
    for (int r = 0; r < h.n_rx; ++r) {
        ComplexGrid res(y[r].rows(), y[r].cols());
        for (size_t i = 0; i < res.size(); ++i) res[i] = y[r][i];
        for (int l = 0; l < h.n_layers; ++l)
            for (size_t i = 0; i < res.size(); ++i) res[i] -= h.at(r, l)[i] * a[l][i] / sc.alpha;
        for (int l = 0; l < h.n_layers; ++l) {
            ComplexGrid& out = score.at(r, l);
            for (size_t i = 0; i < out.size(); ++i) {
                double den = noise_var + ratio2 * std::norm(a[l][i]);
                out[i] = std::conj(a[l][i]) / sc.alpha * res[i] / den;
            }
        }
    }
    return score;
}

LayerGrids likelihood_score_d_literal(const ChannelTensor& h, const LayerGrids& d,
                                      const std::vector<ComplexGrid>& y, const LayerGrids& p,
                                      const PilotConfig& pc, double t, double noise_var,
                                      const Schedule& sched) {
    check_obs_shapes(h, d, y, p);
    ScheduleSample sc = sched.at(t);
    if (sc.alpha <= 0.0) throw std::invalid_argument("literal score: alpha must be positive");
    const double wratio2 = std::pow(pc.data_amp * sc.sigma / sc.alpha, 2);
    LayerGrids a = composite_symbols(d, p, pc);
    LayerGrids score;
    score.reserve(d.size());
    for (size_t l = 0; l < d.size(); ++l) score.emplace_back(d[l].rows(), d[l].cols());
    for (int r = 0; r < h.n_rx; ++r) {
        ComplexGrid res(y[r].rows(), y[r].cols());
        for (size_t i = 0; i < res.size(); ++i) res[i] = y[r][i];
        for (int l = 0; l < h.n_layers; ++l)
            for (size_t i = 0; i < res.size(); ++i) res[i] -= h.at(r, l)[i] * a[l][i] / sc.alpha;
        for (int l = 0; l < h.n_layers; ++l) {
            const ComplexGrid& hs = h.at(r, l);
            for (size_t i = 0; i < res.size(); ++i) {
                double den = noise_var + wratio2 * std::norm(hs[i]);
                score[l][i] += pc.data_amp * pc.data_mask[i] * std::conj(hs[i]) / sc.alpha * res[i] / den;
            }
        }
    }
    return score;
}

double data_residual(const ChannelTensor& h, const LayerGrids& d, const std::vector<ComplexGrid>& y,
                     const LayerGrids& p, const PilotConfig& pc, double alpha) {
    LayerGrids a = composite_symbols(d, p, pc);
    double acc = 0;
    for (int r = 0; r < h.n_rx; ++r) acc += residual_grid(h, a, y[r], r, alpha).squared_norm();
    return acc;
}

double denoised_residual(const SamplerState& state, const std::vector<ComplexGrid>& y,
                         const LayerGrids& p, const PilotConfig& pc,
                         const ChannelVelocityField& vf, const Constellation& con,
                         const Schedule& sched) {
    ScheduleSample sc = sched.at(state.t);
    const int n_rx = state.h.n_rx, n_layers = state.h.n_layers;
    LayerGrids a;
    a.reserve(n_layers);
    for (int l = 0; l < n_layers; ++l) {
        ComplexGrid dhat = constellation_posterior_mean(state.d[l], sc.alpha, sc.sigma, con);
        ComplexGrid g(dhat.rows(), dhat.cols());
        for (size_t i = 0; i < g.size(); ++i)
            g[i] = pc.data_amp * pc.data_mask[i] * dhat[i] +
                   pc.pilot_amp * pc.pilot_mask[i] * p[l][i];
        a.push_back(std::move(g));
    }
    double acc = 0;
    for (int r = 0; r < n_rx; ++r) {
        std::vector<ComplexGrid> h0(n_layers);
        for (int l = 0; l < n_layers; ++l) {
            ComplexGrid v = vf.velocity(state.h.at(r, l), state.t);
            h0[l] = state.h.at(r, l);
            for (size_t i = 0; i < h0[l].size(); ++i) h0[l][i] -= sc.sigma * v[i];
        }
        for (size_t i = 0; i < y[r].size(); ++i) {
            cplx res = y[r][i];
            for (int l = 0; l < n_layers; ++l) res -= h0[l][i] * a[l][i];
            acc += std::norm(res);
        }
    }
    return acc;
}

void predictor_step(SamplerState& state, const ChannelVelocityField& vf, const Constellation& c,
                    double eps, const Schedule& sched) {
    const double t = state.t;
    if (t < eps - 1e-12) throw std::invalid_argument("predictor_step: t < eps");
    (void)sched;
    for (ComplexGrid& hs : state.h.slices) {
        ComplexGrid v = vf.velocity(hs, t);
        for (size_t i = 0; i < hs.size(); ++i) hs[i] -= eps * v[i];
    }
    for (ComplexGrid& dg : state.d) {
        ComplexGrid v = constellation_prior_velocity(dg, t, c);
        for (size_t i = 0; i < dg.size(); ++i) dg[i] -= eps * v[i];
    }
    state.t = t - eps;
}

namespace {

// Relative step sizes of the measurement-consistency relaxation, in units of
// the corrector scale c.  The channel moves with a constant fraction per
// iteration; the symbol grids ramp up as t -> 0 so decisions are not locked
// in before the channel estimate has formed.
constexpr double kEtaChannel = 2.0;
constexpr double kEtaDataRamp = 5.0;
constexpr double kEtaCap = 0.9;

// One measurement-consistency relaxation pass at the denoised pair
// (H0(H_t), D0(D_t)).  Per-RE refinements of the denoised channel are
// re-smoothed through the prior at a noise-matched reference time, then both
// states relax toward the refreshed estimates.
void denoised_consistency_pass(SamplerState& state, const std::vector<ComplexGrid>& y,
                               const LayerGrids& p, const PilotConfig& pc,
                               const ChannelVelocityField& vf, const Constellation& con,
                               const ScheduleSample& sc, double noise_var, double eta_h,
                               double eta_d) {
    const double alpha = sc.alpha, sigma = sc.sigma;
    const double ad = pc.data_amp, ap = pc.pilot_amp;
    const int n_rx = state.h.n_rx, n_layers = state.h.n_layers;
    const int rows = state.d[0].rows(), cols = state.d[0].cols();

    // Soft symbol estimates, their residual variance, and the composite A.
    LayerGrids dhat;
    dhat.reserve(n_layers);
    for (int l = 0; l < n_layers; ++l)
        dhat.push_back(constellation_posterior_mean(state.d[l], alpha, sigma, con));
    LayerGrids a;
    a.reserve(n_layers);
    RealGrid dvar(rows, cols);
    for (int l = 0; l < n_layers; ++l) {
        ComplexGrid g(rows, cols);
        for (size_t i = 0; i < g.size(); ++i) {
            g[i] = ad * pc.data_mask[i] * dhat[l][i] + ap * pc.pilot_mask[i] * p[l][i];
            dvar[i] += ad * ad * pc.data_mask[i] * std::max(0.0, 1.0 - std::norm(dhat[l][i]));
        }
        a.push_back(std::move(g));
    }
    RealGrid energy(rows, cols);
    for (int l = 0; l < n_layers; ++l)
        for (size_t i = 0; i < energy.size(); ++i) energy[i] += std::norm(a[l][i]);

    // Residual noise level of a one-step per-RE refinement, and the matching
    // reference time for prior re-smoothing.
    double vbar = 0;
    for (size_t i = 0; i < energy.size(); ++i)
        vbar += (noise_var + dvar[i]) / (energy[i] + dvar[i] + noise_var);
    vbar /= double(energy.size());
    const double tau = std::sqrt(vbar) / (1.0 + std::sqrt(vbar));
    ScheduleSample sct = ot_schedule().at(tau);

    // Channel: denoise, refine per RE against the full-scale residual,
    // re-smooth through the prior, relax the state toward the result.
    std::vector<ComplexGrid> target(size_t(n_rx) * n_layers);
    for (int r = 0; r < n_rx; ++r) {
        std::vector<ComplexGrid> h0(n_layers);
        for (int l = 0; l < n_layers; ++l) {
            ComplexGrid v = vf.velocity(state.h.at(r, l), state.t);
            h0[l] = state.h.at(r, l);
            for (size_t i = 0; i < h0[l].size(); ++i) h0[l][i] -= sigma * v[i];
        }
        ComplexGrid res(rows, cols);
        for (size_t i = 0; i < res.size(); ++i) {
            res[i] = y[r][i];
            for (int l = 0; l < n_layers; ++l) res[i] -= h0[l][i] * a[l][i];
        }
        for (int l = 0; l < n_layers; ++l) {
            ComplexGrid g(rows, cols);
            for (size_t i = 0; i < g.size(); ++i) {
                double den = energy[i] + dvar[i] + noise_var;
                g[i] = sct.alpha *
                       (h0[l][i] + (den > kDenFloor ? std::conj(a[l][i]) * res[i] / den : cplx(0.0)));
            }
            ComplexGrid vs = vf.velocity(g, tau);
            ComplexGrid& tg = target[size_t(r) * n_layers + l];
            tg = ComplexGrid(rows, cols);
            for (size_t i = 0; i < g.size(); ++i) tg[i] = g[i] - sct.sigma * vs[i];
            ComplexGrid& hs = state.h.at(r, l);
            for (size_t i = 0; i < hs.size(); ++i) hs[i] += eta_h * alpha * (tg[i] - h0[l][i]);
        }
    }

    const bool terminal = sigma <= 0.0;
    if (terminal) {
        // Exact per-RE constellation detection given the refreshed channel,
        // coordinate-wise across layers.
        for (int l = 0; l < n_layers; ++l) {
            for (size_t i = 0; i < state.d[l].size(); ++i) {
                if (pc.data_mask[i] == 0.0) {
                    state.d[l][i] = dhat[l][i];
                    continue;
                }
                double best = std::numeric_limits<double>::infinity();
                cplx best_pt = dhat[l][i];
                for (const cplx& pt : con.points) {
                    double cost = 0;
                    for (int r = 0; r < n_rx; ++r) {
                        const ComplexGrid* tr = &target[size_t(r) * n_layers];
                        cplx res = y[r][i];
                        for (int l2 = 0; l2 < n_layers; ++l2) {
                            cplx sym = (l2 == l) ? ad * pc.data_mask[i] * pt +
                                                       ap * pc.pilot_mask[i] * p[l2][i]
                                                 : a[l2][i];
                            res -= tr[l2][i] * sym;
                        }
                        cost += std::norm(res);
                    }
                    if (cost < best) {
                        best = cost;
                        best_pt = pt;
                    }
                }
                state.d[l][i] = best_pt;
            }
        }
        return;
    }

    // Symbols: matched-filter refinement over antennas at the refreshed
    // channel, then relaxation toward the alpha-scaled refined estimate.
    for (int l = 0; l < n_layers; ++l) {
        ComplexGrid num(rows, cols);
        RealGrid den(rows, cols, noise_var);
        for (int r = 0; r < n_rx; ++r) {
            const ComplexGrid* tr = &target[size_t(r) * n_layers];
            for (size_t i = 0; i < num.size(); ++i) {
                cplx res = y[r][i];
                for (int l2 = 0; l2 < n_layers; ++l2) res -= tr[l2][i] * a[l2][i];
                num[i] += ad * std::conj(tr[l][i]) * res;
                den[i] += ad * ad * std::norm(tr[l][i]);
            }
        }
        for (size_t i = 0; i < num.size(); ++i)
            if (pc.data_mask[i] != 0.0 && den[i] > kDenFloor) {
                cplx refined = dhat[l][i] + num[i] / den[i];
                state.d[l][i] += eta_d * (alpha * refined - state.d[l][i]);
            }
    }
}

}  // namespace

void corrector_step(SamplerState& state, const std::vector<ComplexGrid>& y, const LayerGrids& p,
                    const PilotConfig& pc, const ChannelVelocityField& vf, const Constellation& con,
                    const SamplerConfig& cfg) {
    if (cfg.corrector_iters == 0) return;
    const Schedule& sched = cfg.sched();
    ScheduleSample sc = sched.at(state.t);
    const double eps = 1.0 / cfg.steps;
    const double sign = cfg.corrector_printed_sign ? -1.0 : 1.0;

    // Natural residual scale: E||alpha N||^2 over the frame.
    const double noise_floor =
        sc.alpha * sc.alpha * cfg.noise_var * double(y.size()) * double(y[0].size());
    const double res_before = data_residual(state.h, state.d, y, p, pc, sc.alpha);

    if (cfg.corrector_mode == CorrectorMode::kNormalized) {
        const double eta_h = sign * std::min(kEtaCap, kEtaChannel * cfg.corrector_scale);
        const double eta_d =
            sign * std::min(kEtaCap, kEtaDataRamp * cfg.corrector_scale * (1.0 - state.t));
        for (int k = 0; k < cfg.corrector_iters; ++k)
            denoised_consistency_pass(state, y, p, pc, vf, con, sc, cfg.noise_var, eta_h, eta_d);
    } else {
        double weight = sign * cfg.corrector_scale * eps;
        if (cfg.corrector_mode == CorrectorMode::kKappaScore)
            weight *= sc.singular ? 0.0 : sc.kappa;
        if (weight != 0.0) {
            for (int k = 0; k < cfg.corrector_iters; ++k) {
                ChannelTensor gh =
                    likelihood_score_h(state.h, state.d, y, p, pc, state.t, cfg.noise_var, sched);
                for (size_t i = 0; i < state.h.slices.size(); ++i) {
                    ComplexGrid& hs = state.h.slices[i];
                    const ComplexGrid& gs = gh.slices[i];
                    for (size_t j = 0; j < hs.size(); ++j) hs[j] += weight * gs[j];
                }
                LayerGrids gd =
                    likelihood_score_d(state.h, state.d, y, p, pc, state.t, cfg.noise_var, sched);
                for (size_t l = 0; l < state.d.size(); ++l)
                    for (size_t j = 0; j < state.d[l].size(); ++j) state.d[l][j] += weight * gd[l][j];
            }
        }
    }

    const double res_after = data_residual(state.h, state.d, y, p, pc, sc.alpha);
    if (res_after > 10.0 * std::max(res_before, noise_floor))
        throw std::runtime_error(
            "corrector_step: data-consistency residual grew more than 10x (unstable step size)");
}

CfmRxResult run_cfm_rx(const std::vector<ComplexGrid>& y, const LayerGrids& pilots,
                       const PilotConfig& pc, const ChannelVelocityField& vf,
                       const Constellation& c, const FrameConfig& frame, const SamplerConfig& cfg) {
    cfg.validate();
    pc.validate();
    frame.validate();
    if (int(y.size()) != frame.n_rx || int(pilots.size()) != frame.n_layers)
        throw std::invalid_argument("run_cfm_rx: observation extents do not match frame");

    SamplerState state;
    state.t = 1.0;
    state.h = ChannelTensor(frame.n_rx, frame.n_layers, frame.n_subcarriers, frame.n_symbols);
    Rng rng(mix_seed(cfg.seed, tag::kSamplerInit));
    for (ComplexGrid& g : state.h.slices) rng.fill_cgauss(g, 1.0);
    state.d.clear();
    for (int l = 0; l < frame.n_layers; ++l) {
        ComplexGrid g(frame.n_subcarriers, frame.n_symbols);
        rng.fill_cgauss(g, 1.0);
        state.d.push_back(std::move(g));
    }

    const double eps = 1.0 / cfg.steps;
    for (int i = cfg.steps; i >= 1; --i) {
        state.t = double(i) / cfg.steps;
        predictor_step(state, vf, c, eps, cfg.sched());
        corrector_step(state, y, pilots, pc, vf, c, cfg);
        if (!state.h.all_finite() || ![&] {
                for (const auto& g : state.d)
                    if (!g.all_finite()) return false;
                return true;
            }())
            throw std::runtime_error("run_cfm_rx: non-finite state at step " + std::to_string(i));
    }

    CfmRxResult out;
    out.h0 = std::move(state.h);
    out.d0 = std::move(state.d);
    for (const ComplexGrid& dg : out.d0) {
        std::vector<uint8_t> b = hard_demap(dg, c);
        out.bits.insert(out.bits.end(), b.begin(), b.end());
    }
    return out;
}

}  // namespace cfmrx
