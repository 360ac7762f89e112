// Classical receivers: LS and LMMSE channel estimation, per-RE LMMSE
// equalization, and the two-stage CFM-TEQ pipeline.
#pragma once

#include <memory>

#include "cfmrx/channel.hpp"
#include "cfmrx/frame.hpp"
#include "cfmrx/grid.hpp"
#include "cfmrx/sampler.hpp"

namespace cfmrx {

// SIP: Y / (a_p P) on every RE, data treated as interference.
// OP: Y / P on pilot REs, other REs copied from the nearest pilot symbol.
ChannelTensor ls_estimate(const std::vector<ComplexGrid>& y, const LayerGrids& pilots,
                          const PilotConfig& pc);

// Second-order statistics feeding the LMMSE smoother.  The oracle variant is
// built from oracle_covariance, the practical one from sample_covariance; the
// estimator itself is identical.
class LmmseContext {
  public:
    LmmseContext(const ChannelStats& stats, const PilotConfig& pc, double noise_var);

    // Effective per-RE noise on the LS estimate: (a_d^2 + s2)/a_p^2 under SIP
    // (unit-power data as white interference), s2 under OP.
    double effective_noise_var() const { return eff_noise_var_; }
    const SeparableEig& eig() const { return eig_; }
    const Eigen::MatrixXcd& time_cov() const { return time_cov_; }

    // Normalized closed-form MMSE of the corresponding linear estimator.
    double normalized_mmse() const;

  private:
    friend ChannelTensor lmmse_estimate(const ChannelTensor&, const LmmseContext&, const PilotConfig&);
    SeparableEig eig_;
    Eigen::MatrixXcd time_cov_;
    PilotScheme scheme_;
    double eff_noise_var_;
    int pilot_symbol_ = 0;
};

ChannelTensor lmmse_estimate(const ChannelTensor& ls, const LmmseContext& ctx, const PilotConfig& pc);

// Per-RE MMSE combining over rx antennas: X = (H^H H + s2 I)^{-1} H^H Y.
LayerGrids lmmse_equalize(const std::vector<ComplexGrid>& y, const ChannelTensor& h, double noise_var);

// Recover data symbols from equalized transmit symbols: SIP subtracts the
// known pilot part and rescales; OP keeps data REs and zeroes pilot REs.
LayerGrids strip_pilots(const LayerGrids& x_hat, const LayerGrids& pilots, const PilotConfig& pc);

struct CfmTeqResult {
    ChannelTensor h0;
    std::vector<uint8_t> bits;
};

// Channel estimate from the joint sampler, data from LMMSE equalization; no
// joint refinement of the symbols.
CfmTeqResult run_cfm_teq(const std::vector<ComplexGrid>& y, const LayerGrids& pilots,
                         const PilotConfig& pc, const ChannelVelocityField& vf,
                         const Constellation& c, const FrameConfig& frame, const SamplerConfig& cfg);

}  // namespace cfmrx
