// Unconditional velocity fields: the analytic Gaussian channel prior and the
// analytic constellation prior for data symbols.
#pragma once

#include <memory>

#include "cfmrx/channel.hpp"
#include "cfmrx/constellation.hpp"
#include "cfmrx/grid.hpp"
#include "cfmrx/schedule.hpp"

namespace cfmrx {

// Backend interface for the channel-side velocity; one grid per (rx, layer)
// slice, same field applied to every slice.
class ChannelVelocityField {
  public:
    virtual ~ChannelVelocityField() = default;
    virtual ComplexGrid velocity(const ComplexGrid& state, double t) const = 0;

    void velocity_tensor(const ChannelTensor& h, double t, ChannelTensor& out) const {
        out.n_rx = h.n_rx;
        out.n_layers = h.n_layers;
        out.slices.resize(h.slices.size());
        for (size_t i = 0; i < h.slices.size(); ++i) out.slices[i] = velocity(h.slices[i], t);
    }
};

// Marginal flow velocity for a zero-mean Gaussian prior with separable
// covariance C.  Diagonal in the covariance eigenbasis with multiplier
//   (sigma*dsigma + alpha*dalpha*lam) / (alpha^2*lam + sigma^2),
// which is finite at both endpoints; on (0,1) it equals
// drift*x - kappa*score with score = -(alpha^2 C + sigma^2 I)^{-1} x.
class GaussianChannelPrior final : public ChannelVelocityField {
  public:
    GaussianChannelPrior(const ChannelStats& stats, const Schedule& sched = ot_schedule());

    ComplexGrid velocity(const ComplexGrid& state, double t) const override;

    // drift*x - kappa*score evaluated literally; diagnostic route, valid on
    // t in (0,1) only.
    ComplexGrid velocity_literal(const ComplexGrid& state, double t) const;

    // Closed-form Gaussian posterior mean E[h | y = h + n], n white with
    // variance noise_var per entry: C (C + noise_var I)^{-1} y.
    ComplexGrid posterior_mean(const ComplexGrid& y, double noise_var) const;

    // tr(C - C(C + noise_var I)^{-1} C) / tr(C), the normalized MMSE of the
    // same observation model.
    double normalized_mmse(double noise_var) const;

    const SeparableEig& eig() const { return eig_; }

  private:
    SeparableEig eig_;
    const Schedule* sched_;
};

// Elementwise E[D0 | D_t] for a uniform constellation prior, computed with
// log-domain weights and max subtraction.  sigma = 0 returns the nearest
// constellation point.
ComplexGrid constellation_posterior_mean(const ComplexGrid& d, double alpha, double sigma,
                                         const Constellation& c);

// OT-path prior velocity for the data grids, stable form (D_t - E[D0|D_t])/t.
ComplexGrid constellation_prior_velocity(const ComplexGrid& d, double t, const Constellation& c);

// Literal composition drift*D - kappa*(alpha*E[D0|D_t] - D_t)/sigma^2;
// diagnostic route for schedule identities, t in (0,1).
ComplexGrid constellation_prior_velocity_literal(const ComplexGrid& d, const ScheduleSample& s,
                                                 const Constellation& c);

}  // namespace cfmrx
