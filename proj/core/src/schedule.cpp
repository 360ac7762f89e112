#include "cfmrx/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace cfmrx {

ScheduleSample OtSchedule::at(double t) const {
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("OtSchedule: t must be in [0, 1]");
    ScheduleSample s;
    s.alpha = 1.0 - t;
    s.sigma = t;
    s.dalpha = -1.0;
    s.dsigma = 1.0;
    if (s.alpha > 0.0) {
        s.drift = s.dalpha / s.alpha;
        s.lambda = s.dsigma - s.drift * s.sigma;
        s.kappa = s.lambda * s.sigma;
        s.diffusion = std::sqrt(2.0 * s.kappa);
    } else {
        s.singular = true;
    }
    return s;
}

const OtSchedule& ot_schedule() {
    static const OtSchedule sched;
    return sched;
}

TimeGrid TimeGrid::uniform(int steps) {
    if (steps < 1) throw std::invalid_argument("TimeGrid: need at least one step");
    TimeGrid g;
    g.steps = steps;
    g.step_size = 1.0 / steps;
    g.nodes.resize(size_t(steps) + 1);
    for (int i = 0; i <= steps; ++i) g.nodes[i] = double(steps - i) / steps;
    return g;
}

}  // namespace cfmrx
