// Interpolation schedule x_t = alpha_t x0 + sigma_t x1 and the moment-matched
// drift/diffusion coefficients of the score ODE.
#pragma once

#include <vector>

#include "cfmrx/grid.hpp"

namespace cfmrx {

// Schedule values at one time.  drift = dalpha/alpha, lambda = dsigma -
// drift*sigma, kappa = lambda*sigma, diffusion g = sqrt(2*kappa).  At points
// where alpha = 0 the rational quantities blow up; `singular` flags them and
// callers must use the stabilized algebra instead.
struct ScheduleSample {
    double alpha = 0, sigma = 0;
    double dalpha = 0, dsigma = 0;
    double drift = 0, lambda = 0, kappa = 0, diffusion = 0;
    bool singular = false;
};

class Schedule {
  public:
    virtual ~Schedule() = default;
    virtual ScheduleSample at(double t) const = 0;
};

// Straight-line transport: alpha = 1-t, sigma = t.  The conditional velocity
// x1 - x0 is constant along the path.
class OtSchedule final : public Schedule {
  public:
    ScheduleSample at(double t) const override;
};

const OtSchedule& ot_schedule();

// Uniform descending grid 1, (T-1)/T, ..., 1/T, 0.
struct TimeGrid {
    int steps = 0;
    double step_size = 0;
    std::vector<double> nodes;

    static TimeGrid uniform(int steps);
};

}  // namespace cfmrx
