// Conditional predictor-corrector inference: likelihood scores on the shared
// residual alpha*Y - sum_l H o A_l, Euler predictor on the prior velocities,
// likelihood-ascent corrector, joint recovery of (H0, D0).
#pragma once

#include <cstdint>
#include <vector>

#include "cfmrx/constellation.hpp"
#include "cfmrx/frame.hpp"
#include "cfmrx/grid.hpp"
#include "cfmrx/prior.hpp"
#include "cfmrx/schedule.hpp"

namespace cfmrx {

// How the K likelihood-ascent iterations are scaled.
//   kNormalized: per-RE regularized Newton step on the data-consistency
//     residual; per-iteration contraction bounded by c at every SNR.
//   kKappaScore: c*eps*kappa_t times the raw likelihood score; the weighting
//     implied by the conditional-velocity decomposition, exact for the
//     linear-Gaussian (pilot-only) regime.
//   kBareScore: c*eps times the raw score, the printed form.
enum class CorrectorMode { kNormalized, kKappaScore, kBareScore };

struct SamplerConfig {
    int steps = 30;
    int corrector_iters = 5;
    double corrector_scale = 0.2;  // the step-size hyperparameter c, default 1/K

    CorrectorMode corrector_mode = CorrectorMode::kNormalized;
    // Subtract instead of add the likelihood term (the printed sign).
    bool corrector_printed_sign = false;

    double noise_var = 0.1;
    uint64_t seed = 0;
    const Schedule* schedule = nullptr;  // null selects the OT schedule

    const Schedule& sched() const { return schedule ? *schedule : ot_schedule(); }

    void validate() const;
};

struct SamplerState {
    ChannelTensor h;
    LayerGrids d;
    double t = 1.0;
};

// Composite per-layer symbol estimate A_l = a_d M_d o D_l + a_p M_p o P_l.
LayerGrids composite_symbols(const LayerGrids& d, const LayerGrids& p, const PilotConfig& pc);

// Gradient of the observation log-likelihood with respect to the channel
// slices, in the stabilized form
//   conj(A_l) o (alpha Y_r - sum_l' H_{r,l'} o A_l') / (alpha^2 s2 + sigma^2 |A_l|^2),
// finite at t = 1.
ChannelTensor likelihood_score_h(const ChannelTensor& h, const LayerGrids& d,
                                 const std::vector<ComplexGrid>& y, const LayerGrids& p,
                                 const PilotConfig& pc, double t, double noise_var,
                                 const Schedule& sched = ot_schedule());

// Gradient with respect to the data grids, summed over rx antennas and zeroed
// on pilot-only REs.
LayerGrids likelihood_score_d(const ChannelTensor& h, const LayerGrids& d,
                              const std::vector<ComplexGrid>& y, const LayerGrids& p,
                              const PilotConfig& pc, double t, double noise_var,
                              const Schedule& sched = ot_schedule());

// Literal forms with the explicit 1/alpha scaling; diagnostic routes, valid
// away from alpha = 0.
ChannelTensor likelihood_score_h_literal(const ChannelTensor& h, const LayerGrids& d,
                                         const std::vector<ComplexGrid>& y, const LayerGrids& p,
                                         const PilotConfig& pc, double t, double noise_var,
                                         const Schedule& sched = ot_schedule());
LayerGrids likelihood_score_d_literal(const ChannelTensor& h, const LayerGrids& d,
                                      const std::vector<ComplexGrid>& y, const LayerGrids& p,
                                      const PilotConfig& pc, double t, double noise_var,
                                      const Schedule& sched = ot_schedule());

// Squared data-consistency residual ||alpha Y - sum_l H o A_l||^2.
double data_residual(const ChannelTensor& h, const LayerGrids& d, const std::vector<ComplexGrid>& y,
                     const LayerGrids& p, const PilotConfig& pc, double alpha);

// Residual of the denoised pair, ||Y - sum_l H0(H_t) o A_l(D0(D_t))||^2; the
// measure the default corrector mode drives down.
double denoised_residual(const SamplerState& state, const std::vector<ComplexGrid>& y,
                         const LayerGrids& p, const PilotConfig& pc,
                         const ChannelVelocityField& vf, const Constellation& con,
                         const Schedule& sched = ot_schedule());

// One explicit Euler step of the reverse flow for both H and D; advances
// state.t by -eps.
void predictor_step(SamplerState& state, const ChannelVelocityField& vf, const Constellation& c,
                    double eps, const Schedule& sched = ot_schedule());

// K likelihood-driven refinement iterations at the state's current time.
// The default mode relaxes both states toward measurement-consistent
// denoised estimates (see CorrectorMode); the score modes apply plain
// gradient steps.  Throws if the data-consistency residual grows by more
// than 10x across the K iterations.
void corrector_step(SamplerState& state, const std::vector<ComplexGrid>& y, const LayerGrids& p,
                    const PilotConfig& pc, const ChannelVelocityField& vf, const Constellation& con,
                    const SamplerConfig& cfg);

struct CfmRxResult {
    ChannelTensor h0;
    LayerGrids d0;
    std::vector<uint8_t> bits;  // hard-demapped, all REs in row-major order per layer
};

// Full reverse loop i = T..1 with predictor then corrector at each node.
CfmRxResult run_cfm_rx(const std::vector<ComplexGrid>& y, const LayerGrids& pilots,
                       const PilotConfig& pc, const ChannelVelocityField& vf,
                       const Constellation& c, const FrameConfig& frame, const SamplerConfig& cfg);

}  // namespace cfmrx
