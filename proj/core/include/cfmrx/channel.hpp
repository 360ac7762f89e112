// Synthetic frequency-selective channel generation with exact second-order
// statistics, plus the separable-covariance machinery shared by the Gaussian
// prior and the LMMSE baselines.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cfmrx/frame.hpp"
#include "cfmrx/grid.hpp"

namespace cfmrx {

// Tapped delay line with AR(1) time evolution.  Tap gains are i.i.d.
// CN(0, p_i) per (rx, layer); sum of tap powers is 1 so every RE has unit
// average power.
struct ChannelProfile {
    std::vector<double> tap_delay_s;   // ascending, seconds
    std::vector<double> tap_power;     // linear, sums to 1
    double subcarrier_spacing_hz = 15e3;
    double time_corr = 1.0;            // AR(1) coefficient per OFDM symbol

    // Exponential power-delay profile, n_taps taps spaced tap_step_s apart.
    static ChannelProfile exponential(int n_taps, double tap_step_s, double tau_rms_s,
                                      double subcarrier_spacing_hz, double time_corr);

    // 8 taps, 150 ns spacing, 300 ns rms delay spread, 15 kHz spacing and the
    // Jakes time correlation for 3 km/h at 3.5 GHz with 1 ms / 14 symbols.
    static ChannelProfile desk_default();

    static double jakes_time_corr(double speed_kmh, double carrier_hz, double symbol_period_s);

    void validate() const;
    uint64_t hash() const;
};

// Separable RE covariance C = C_f kron C_t; both factors Hermitian PSD with
// (near) unit diagonal.
struct ChannelStats {
    Eigen::MatrixXcd freq_cov;  // N_S x N_S
    Eigen::MatrixXcd time_cov;  // N_T x N_T

    void validate() const;  // throws if not Hermitian PSD (tolerance 1e-9)
};

// Cached eigendecomposition of a separable covariance.  Grid-domain operators
// that are functions of C become elementwise multipliers between the forward
// and inverse transforms.
class SeparableEig {
  public:
    explicit SeparableEig(const ChannelStats& stats);

    int rows() const { return int(freq_vecs_.rows()); }
    int cols() const { return int(time_vecs_.rows()); }
    const Eigen::VectorXd& freq_eigenvalues() const { return freq_vals_; }
    const Eigen::VectorXd& time_eigenvalues() const { return time_vals_; }
    const Eigen::MatrixXcd& freq_basis() const { return freq_vecs_; }
    const Eigen::MatrixXcd& time_basis() const { return time_vecs_; }

    // Eigenvalue of mode (i, j) of the RE covariance.
    double mode_eigenvalue(int i, int j) const { return freq_vals_[i] * time_vals_[j]; }

    Eigen::MatrixXcd to_eigenbasis(const ComplexGrid& g) const;
    ComplexGrid from_eigenbasis(const Eigen::MatrixXcd& m) const;

    // out = f(C) g where f acts on eigenvalues via the supplied multiplier.
    template <typename Fn>
    ComplexGrid apply(const ComplexGrid& g, Fn&& multiplier) const {
        Eigen::MatrixXcd m = to_eigenbasis(g);
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) m(i, j) *= multiplier(mode_eigenvalue(i, j));
        return from_eigenbasis(m);
    }

  private:
    Eigen::MatrixXcd freq_vecs_, time_vecs_;
    Eigen::VectorXd freq_vals_, time_vals_;
};

ChannelTensor generate_channel(const ChannelProfile& profile, const FrameConfig& f, uint64_t seed);

// Exact C_f[s,s'] = sum_i p_i exp(-j2pi(s-s')df tau_i), C_t[n,n'] = rho^|n-n'|.
ChannelStats oracle_covariance(const ChannelProfile& profile, const FrameConfig& f);

// Empirical separable covariance from the first `count` tensors, averaged over
// antennas, layers and (for the frequency factor) OFDM symbols, then projected
// onto the PSD cone.
ChannelStats sample_covariance(const std::vector<ChannelTensor>& samples, size_t count);

}  // namespace cfmrx
