#include "cfmrx/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cfmrx/rng.hpp"

namespace cfmrx {

namespace {

Eigen::MatrixXcd psd_project(Eigen::MatrixXcd m) {
    m = (m + m.adjoint().eval()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

ChannelProfile ChannelProfile::exponential(int n_taps, double tap_step_s, double tau_rms_s,
                                           double subcarrier_spacing_hz, double time_corr) {
    if (n_taps < 1) throw std::invalid_argument("ChannelProfile: need at least one tap");
    ChannelProfile p;
    p.subcarrier_spacing_hz = subcarrier_spacing_hz;
    p.time_corr = time_corr;
    p.tap_delay_s.resize(n_taps);
    p.tap_power.resize(n_taps);
    double acc = 0;
    for (int i = 0; i < n_taps; ++i) {
        p.tap_delay_s[i] = i * tap_step_s;
        p.tap_power[i] = std::exp(-p.tap_delay_s[i] / tau_rms_s);
        acc += p.tap_power[i];
    }
    for (double& w : p.tap_power) w /= acc;
    return p;
}

double ChannelProfile::jakes_time_corr(double speed_kmh, double carrier_hz, double symbol_period_s) {
    double doppler_hz = (speed_kmh / 3.6) * carrier_hz / 299792458.0;
    return std::cyl_bessel_j(0.0, 2.0 * std::numbers::pi * doppler_hz * symbol_period_s);
}

ChannelProfile ChannelProfile::desk_default() {
    double rho = jakes_time_corr(3.0, 3.5e9, 1e-3 / 14.0);
    return exponential(8, 150e-9, 300e-9, 15e3, rho);
}

void ChannelProfile::validate() const {
    if (tap_delay_s.empty() || tap_delay_s.size() != tap_power.size())
        throw std::invalid_argument("ChannelProfile: tap arrays empty or mismatched");
    double acc = 0;
    for (size_t i = 0; i < tap_power.size(); ++i) {
        if (!(tap_power[i] > 0)) throw std::invalid_argument("ChannelProfile: tap powers must be positive");
        if (tap_delay_s[i] < 0 || (i > 0 && tap_delay_s[i] < tap_delay_s[i - 1]))
            throw std::invalid_argument("ChannelProfile: tap delays must be ascending and nonnegative");
        acc += tap_power[i];
    }
    if (std::abs(acc - 1.0) > 1e-9) throw std::invalid_argument("ChannelProfile: tap powers must sum to 1");
    if (time_corr < 0.0 || time_corr > 1.0)
        throw std::invalid_argument("ChannelProfile: time correlation must be in [0, 1]");
}

uint64_t ChannelProfile::hash() const {
    // FNV-1a over the bit patterns of the profile parameters.
    uint64_t h = 0xcbf29ce484222325ULL;
    auto fold = [&h](uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    auto fold_d = [&](double d) {
        uint64_t v;
        static_assert(sizeof(v) == sizeof(d));
        std::memcpy(&v, &d, sizeof(v));
        fold(v);
    };
    fold(tap_delay_s.size());
    for (double d : tap_delay_s) fold_d(d);
    for (double p : tap_power) fold_d(p);
    fold_d(subcarrier_spacing_hz);
    fold_d(time_corr);
    return h;
}

ChannelTensor generate_channel(const ChannelProfile& profile, const FrameConfig& f, uint64_t seed) {
    profile.validate();
    f.validate();
    const int n_taps = int(profile.tap_power.size());
    const double rho = profile.time_corr;
    const double innov = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    const double two_pi = 2.0 * std::numbers::pi;

    // Per-subcarrier steering phases e^{-j 2 pi s df tau_i}.
    std::vector<cplx> steer(size_t(f.n_subcarriers) * n_taps);
    for (int s = 0; s < f.n_subcarriers; ++s)
        for (int i = 0; i < n_taps; ++i) {
            double ang = -two_pi * s * profile.subcarrier_spacing_hz * profile.tap_delay_s[i];
            steer[size_t(s) * n_taps + i] = cplx(std::cos(ang), std::sin(ang));
        }

    ChannelTensor h(f.n_rx, f.n_layers, f.n_subcarriers, f.n_symbols);
    std::vector<cplx> gains(n_taps);
    for (int r = 0; r < f.n_rx; ++r)
        for (int l = 0; l < f.n_layers; ++l) {
            Rng rng(mix_seed(mix_seed(seed, uint64_t(r)), uint64_t(l)));
            ComplexGrid& g = h.at(r, l);
            for (int i = 0; i < n_taps; ++i) gains[i] = rng.cgauss(profile.tap_power[i]);
            for (int n = 0; n < f.n_symbols; ++n) {
                if (n > 0)
                    for (int i = 0; i < n_taps; ++i)
                        gains[i] = rho * gains[i] + innov * rng.cgauss(profile.tap_power[i]);
                for (int s = 0; s < f.n_subcarriers; ++s) {
                    cplx acc = 0;
                    const cplx* st = &steer[size_t(s) * n_taps];
                    for (int i = 0; i < n_taps; ++i) acc += gains[i] * st[i];
                    g(s, n) = acc;
                }
            }
        }
    return h;
}

ChannelStats oracle_covariance(const ChannelProfile& profile, const FrameConfig& f) {
    profile.validate();
    f.validate();
    const double two_pi = 2.0 * std::numbers::pi;
    ChannelStats st;
    st.freq_cov.resize(f.n_subcarriers, f.n_subcarriers);
    for (int s = 0; s < f.n_subcarriers; ++s)
        for (int q = 0; q < f.n_subcarriers; ++q) {
            cplx acc = 0;
            for (size_t i = 0; i < profile.tap_power.size(); ++i) {
                double ang = -two_pi * (s - q) * profile.subcarrier_spacing_hz * profile.tap_delay_s[i];
                acc += profile.tap_power[i] * cplx(std::cos(ang), std::sin(ang));
            }
            st.freq_cov(s, q) = acc;
        }
    st.time_cov.resize(f.n_symbols, f.n_symbols);
    for (int a = 0; a < f.n_symbols; ++a)
        for (int b = 0; b < f.n_symbols; ++b)
            st.time_cov(a, b) = std::pow(profile.time_corr, std::abs(a - b));
    return st;
}

ChannelStats sample_covariance(const std::vector<ChannelTensor>& samples, size_t count) {
    if (samples.empty() || count == 0) throw std::invalid_argument("sample_covariance: empty dataset");
    if (count > samples.size()) throw std::invalid_argument("sample_covariance: count exceeds dataset size");

    const ComplexGrid& g0 = samples[0].at(0, 0);
    const int ns = g0.rows(), nt = g0.cols();
    Eigen::MatrixXcd cf = Eigen::MatrixXcd::Zero(ns, ns);
    Eigen::MatrixXcd ct = Eigen::MatrixXcd::Zero(nt, nt);
    size_t cf_terms = 0, ct_terms = 0;
    Eigen::VectorXcd col(ns), row(nt);
    for (size_t k = 0; k < count; ++k) {
        const ChannelTensor& h = samples[k];
        for (const ComplexGrid& g : h.slices) {
            for (int n = 0; n < nt; ++n) {
                for (int s = 0; s < ns; ++s) col[s] = g(s, n);
                cf.noalias() += col * col.adjoint();
                ++cf_terms;
            }
            for (int s = 0; s < ns; ++s) {
                for (int n = 0; n < nt; ++n) row[n] = g(s, n);
                ct.noalias() += row * row.adjoint();
                ++ct_terms;
            }
        }
    }
    ChannelStats st;
    st.freq_cov = psd_project(cf / double(cf_terms));
    // Normalize the time factor so the Kronecker product keeps the grid scale
    // carried by the frequency factor.
    Eigen::MatrixXcd ctm = ct / double(ct_terms);
    double d = ctm.diagonal().real().mean();
    if (d > 0) ctm /= d;
    st.time_cov = psd_project(ctm);
    return st;
}

void ChannelStats::validate() const {
    auto check = [](const Eigen::MatrixXcd& m, const char* what) {
        if (m.rows() != m.cols()) throw std::invalid_argument(std::string(what) + ": not square");
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
            throw std::invalid_argument(std::string(what) + ": not Hermitian");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-9)
            throw std::invalid_argument(std::string(what) + ": not positive semidefinite");
    };
    check(freq_cov, "ChannelStats.freq_cov");
    check(time_cov, "ChannelStats.time_cov");
}

SeparableEig::SeparableEig(const ChannelStats& stats) {
    stats.validate();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ef(stats.freq_cov);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> et(stats.time_cov);
    freq_vecs_ = ef.eigenvectors();
    time_vecs_ = et.eigenvectors();
    freq_vals_ = ef.eigenvalues().cwiseMax(0.0);
    time_vals_ = et.eigenvalues().cwiseMax(0.0);
}

Eigen::MatrixXcd SeparableEig::to_eigenbasis(const ComplexGrid& g) const {
    Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        g.data(), g.rows(), g.cols());
    return freq_vecs_.adjoint() * m * time_vecs_.conjugate();
}

ComplexGrid SeparableEig::from_eigenbasis(const Eigen::MatrixXcd& m) const {
    Eigen::MatrixXcd out = freq_vecs_ * m * time_vecs_.transpose();
    ComplexGrid g(int(out.rows()), int(out.cols()));
    Eigen::Map<Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        g.data(), g.rows(), g.cols()) = out;
    return g;
}

}  // namespace cfmrx
