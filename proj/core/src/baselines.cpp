#include "cfmrx/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace cfmrx {

namespace {

// Pilot symbol columns (columns whose every RE is a pilot).
std::vector<int> pilot_columns(const PilotConfig& pc) {
    std::vector<int> cols;
    for (int n = 0; n < pc.pilot_mask.cols(); ++n) {
        bool all = true;
        for (int s = 0; s < pc.pilot_mask.rows(); ++s)
            if (pc.pilot_mask(s, n) != 1.0) {
                all = false;
                break;
            }
        if (all) cols.push_back(n);
    }
    return cols;
}

int nearest(const std::vector<int>& cols, int n) {
    int best = cols[0];
    for (int c : cols)
        if (std::abs(c - n) < std::abs(best - n)) best = c;
    return best;
}

}  // namespace

ChannelTensor ls_estimate(const std::vector<ComplexGrid>& y, const LayerGrids& pilots,
                          const PilotConfig& pc) {
    pc.validate();
    const int n_rx = int(y.size()), n_layers = int(pilots.size());
    const int rows = y[0].rows(), cols = y[0].cols();
    ChannelTensor h(n_rx, n_layers, rows, cols);

    if (pc.scheme == PilotScheme::SIP) {
        if (pc.pilot_amp == 0.0) throw std::invalid_argument("ls_estimate: zero pilot amplitude");
        for (int r = 0; r < n_rx; ++r)
            for (int l = 0; l < n_layers; ++l) {
                ComplexGrid& out = h.at(r, l);
                for (size_t i = 0; i < out.size(); ++i) {
                    cplx p = pc.pilot_amp * pilots[l][i];
                    if (p == cplx(0.0)) throw std::invalid_argument("ls_estimate: zero pilot entry");
                    out[i] = y[r][i] / p;
                }
            }
        return h;
    }

    std::vector<int> pcols = pilot_columns(pc);
    if (pcols.empty()) throw std::invalid_argument("ls_estimate: OP config has no pilot symbol");
    for (int r = 0; r < n_rx; ++r)
        for (int l = 0; l < n_layers; ++l) {
            ComplexGrid& out = h.at(r, l);
            for (int c : pcols)
                for (int s = 0; s < rows; ++s) {
                    cplx p = pilots[l](s, c);
                    if (p == cplx(0.0)) throw std::invalid_argument("ls_estimate: zero pilot entry");
                    out(s, c) = y[r](s, c) / p;
                }
            for (int n = 0; n < cols; ++n) {
                if (std::find(pcols.begin(), pcols.end(), n) != pcols.end()) continue;
                int src = nearest(pcols, n);
                for (int s = 0; s < rows; ++s) out(s, n) = out(s, src);
            }
        }
    return h;
}

LmmseContext::LmmseContext(const ChannelStats& stats, const PilotConfig& pc, double noise_var)
    : eig_(stats), time_cov_(stats.time_cov), scheme_(pc.scheme) {
    if (!(noise_var > 0)) throw std::invalid_argument("LmmseContext: noise variance must be positive");
    if (scheme_ == PilotScheme::SIP) {
        if (pc.pilot_amp == 0.0) throw std::invalid_argument("LmmseContext: zero pilot amplitude");
        eff_noise_var_ =
            (pc.data_amp * pc.data_amp + noise_var) / (pc.pilot_amp * pc.pilot_amp);
    } else {
        eff_noise_var_ = noise_var;
        std::vector<int> pcols = pilot_columns(pc);
        if (pcols.empty()) throw std::invalid_argument("LmmseContext: OP config has no pilot symbol");
        pilot_symbol_ = pcols.front();
    }
}

double LmmseContext::normalized_mmse() const {
    const double s2 = eff_noise_var_;
    double trace = 0;
    for (int i = 0; i < eig_.rows(); ++i)
        for (int j = 0; j < eig_.cols(); ++j) trace += eig_.mode_eigenvalue(i, j);
    if (trace <= 0) throw std::invalid_argument("LmmseContext: degenerate covariance");

    if (scheme_ == PilotScheme::SIP) {
        double mmse = 0;
        for (int i = 0; i < eig_.rows(); ++i)
            for (int j = 0; j < eig_.cols(); ++j) {
                double lam = eig_.mode_eigenvalue(i, j);
                mmse += lam * s2 / (lam + s2);
            }
        return mmse / trace;
    }
    // Column-pilot case: error trace tr(C) - ||c_t||^2 tr(Cf (Cf+s2)^{-1} Cf).
    double ct_norm2 = 0;
    for (int n = 0; n < time_cov_.rows(); ++n) ct_norm2 += std::norm(time_cov_(n, pilot_symbol_));
    double captured = 0;
    for (int i = 0; i < eig_.rows(); ++i) {
        double lf = eig_.freq_eigenvalues()[i];
        captured += lf * lf / (lf + s2);
    }
    return (trace - ct_norm2 * captured) / trace;
}

ChannelTensor lmmse_estimate(const ChannelTensor& ls, const LmmseContext& ctx, const PilotConfig& pc) {
    const double s2 = ctx.eff_noise_var_;
    ChannelTensor out(ls.n_rx, ls.n_layers, ls.at(0, 0).rows(), ls.at(0, 0).cols());
    if (ls.at(0, 0).rows() != ctx.eig_.rows() || ls.at(0, 0).cols() != ctx.eig_.cols())
        throw std::invalid_argument("lmmse_estimate: stats dims do not match estimate dims");

    if (ctx.scheme_ == PilotScheme::SIP) {
        for (size_t i = 0; i < ls.slices.size(); ++i)
            out.slices[i] = ctx.eig_.apply(ls.slices[i], [s2](double lam) { return lam / (lam + s2); });
        return out;
    }

    // Smooth the pilot column across frequency, then spread across time with
    // the pilot-column correlation profile.
    (void)pc;
    const int rows = ls.at(0, 0).rows(), cols = ls.at(0, 0).cols();
    const int cp = ctx.pilot_symbol_;
    for (size_t k = 0; k < ls.slices.size(); ++k) {
        Eigen::VectorXcd p(rows);
        for (int s = 0; s < rows; ++s) p[s] = ls.slices[k](s, cp);
        Eigen::VectorXcd g = ctx.eig_.freq_basis().adjoint() * p;
        for (int i = 0; i < rows; ++i) {
            double lf = ctx.eig_.freq_eigenvalues()[i];
            g[i] *= lf / (lf + s2);
        }
        Eigen::VectorXcd smooth = ctx.eig_.freq_basis() * g;
        for (int n = 0; n < cols; ++n) {
            cplx w = ctx.time_cov_(n, cp);
            for (int s = 0; s < rows; ++s) out.slices[k](s, n) = w * smooth[s];
        }
    }
    return out;
}

LayerGrids lmmse_equalize(const std::vector<ComplexGrid>& y, const ChannelTensor& h, double noise_var) {
    const int n_rx = h.n_rx, n_layers = h.n_layers;
    const int rows = h.at(0, 0).rows(), cols = h.at(0, 0).cols();
    if (int(y.size()) != n_rx) throw std::invalid_argument("lmmse_equalize: antenna counts differ");

    LayerGrids x;
    for (int l = 0; l < n_layers; ++l) x.emplace_back(rows, cols);

    if (n_layers == 1) {
        for (size_t i = 0; i < x[0].size(); ++i) {
            cplx num = 0;
            double den = noise_var;
            for (int r = 0; r < n_rx; ++r) {
                num += std::conj(h.at(r, 0)[i]) * y[r][i];
                den += std::norm(h.at(r, 0)[i]);
            }
            x[0][i] = den > 0 ? num / den : cplx(0.0);
        }
        return x;
    }

    Eigen::MatrixXcd hre(n_rx, n_layers);
    Eigen::VectorXcd yre(n_rx);
    for (size_t i = 0; i < x[0].size(); ++i) {
        for (int r = 0; r < n_rx; ++r) {
            yre[r] = y[r][i];
            for (int l = 0; l < n_layers; ++l) hre(r, l) = h.at(r, l)[i];
        }
        Eigen::MatrixXcd a = hre.adjoint() * hre;
        a.diagonal().array() += noise_var;
        Eigen::VectorXcd sol = a.ldlt().solve(hre.adjoint() * yre);
        for (int l = 0; l < n_layers; ++l) x[l][i] = sol[l];
    }
    return x;
}

LayerGrids strip_pilots(const LayerGrids& x_hat, const LayerGrids& pilots, const PilotConfig& pc) {
    LayerGrids d;
    d.reserve(x_hat.size());
    for (size_t l = 0; l < x_hat.size(); ++l) {
        ComplexGrid g(x_hat[l].rows(), x_hat[l].cols());
        for (size_t i = 0; i < g.size(); ++i) {
            if (pc.scheme == PilotScheme::SIP) {
                g[i] = pc.data_amp > 0.0
                           ? (x_hat[l][i] - pc.pilot_amp * pilots[l][i]) / pc.data_amp
                           : cplx(0.0);
            } else {
                g[i] = pc.data_mask[i] != 0.0 ? x_hat[l][i] : cplx(0.0);
            }
        }
        d.push_back(std::move(g));
    }
    return d;
}

CfmTeqResult run_cfm_teq(const std::vector<ComplexGrid>& y, const LayerGrids& pilots,
                         const PilotConfig& pc, const ChannelVelocityField& vf,
                         const Constellation& c, const FrameConfig& frame, const SamplerConfig& cfg) {
    CfmRxResult joint = run_cfm_rx(y, pilots, pc, vf, c, frame, cfg);
    LayerGrids x_hat = lmmse_equalize(y, joint.h0, cfg.noise_var);
    LayerGrids d_hat = strip_pilots(x_hat, pilots, pc);
    CfmTeqResult out;
    out.h0 = std::move(joint.h0);
    for (const ComplexGrid& dg : d_hat) {
        std::vector<uint8_t> b = hard_demap(dg, c);
        out.bits.insert(out.bits.end(), b.begin(), b.end());
    }
    return out;
}

}  // namespace cfmrx
