#include "cfmrx/prior.hpp"

#include <cmath>
#include <stdexcept>

namespace cfmrx {

GaussianChannelPrior::GaussianChannelPrior(const ChannelStats& stats, const Schedule& sched)
    : eig_(stats), sched_(&sched) {}

ComplexGrid GaussianChannelPrior::velocity(const ComplexGrid& state, double t) const {
    ScheduleSample s = sched_->at(t);
    return eig_.apply(state, [&s](double lam) {
        double num = s.sigma * s.dsigma + s.alpha * s.dalpha * lam;
        double den = s.alpha * s.alpha * lam + s.sigma * s.sigma;
        return den > 0 ? num / den : 0.0;
    });
}

ComplexGrid GaussianChannelPrior::velocity_literal(const ComplexGrid& state, double t) const {
    ScheduleSample s = sched_->at(t);
    if (s.singular || s.sigma <= 0.0)
        throw std::invalid_argument("velocity_literal: valid on t in (0,1) only");
    return eig_.apply(state, [&s](double lam) {
        return s.drift + s.kappa / (s.alpha * s.alpha * lam + s.sigma * s.sigma);
    });
}

ComplexGrid GaussianChannelPrior::posterior_mean(const ComplexGrid& y, double noise_var) const {
    return eig_.apply(y, [noise_var](double lam) { return lam / (lam + noise_var); });
}

double GaussianChannelPrior::normalized_mmse(double noise_var) const {
    double mmse = 0, trace = 0;
    for (int i = 0; i < eig_.rows(); ++i)
        for (int j = 0; j < eig_.cols(); ++j) {
            double lam = eig_.mode_eigenvalue(i, j);
            mmse += lam * noise_var / (lam + noise_var);
            trace += lam;
        }
    if (trace <= 0) throw std::invalid_argument("normalized_mmse: degenerate covariance");
    return mmse / trace;
}

ComplexGrid constellation_posterior_mean(const ComplexGrid& d, double alpha, double sigma,
                                         const Constellation& c) {
    ComplexGrid out(d.rows(), d.cols());
    const size_t m = c.size();
    if (sigma <= 0.0) {
        // Limit: posterior collapses onto the nearest scaled point.
        for (size_t i = 0; i < d.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            size_t best_k = 0;
            for (size_t k = 0; k < m; ++k) {
                double dist = std::norm(d[i] - alpha * c.points[k]);
                if (dist < best) {
                    best = dist;
                    best_k = k;
                }
            }
            out[i] = c.points[best_k];
        }
        return out;
    }
    const double inv_two_var = 1.0 / (2.0 * std::max(sigma * sigma, 1e-24));
    std::vector<double> logw(m);
    for (size_t i = 0; i < d.size(); ++i) {
        double wmax = -std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < m; ++k) {
            logw[k] = -std::norm(d[i] - alpha * c.points[k]) * inv_two_var;
            wmax = std::max(wmax, logw[k]);
        }
        cplx num = 0;
        double den = 0;
        for (size_t k = 0; k < m; ++k) {
            double w = std::exp(logw[k] - wmax);
            num += w * c.points[k];
            den += w;
        }
        out[i] = num / den;
    }
    return out;
}

ComplexGrid constellation_prior_velocity(const ComplexGrid& d, double t, const Constellation& c) {
    if (!(t > 0.0)) throw std::invalid_argument("constellation_prior_velocity: t must be positive");
    ComplexGrid mean = constellation_posterior_mean(d, 1.0 - t, t, c);
    ComplexGrid out(d.rows(), d.cols());
    for (size_t i = 0; i < d.size(); ++i) out[i] = (d[i] - mean[i]) / t;
    return out;
}

ComplexGrid constellation_prior_velocity_literal(const ComplexGrid& d, const ScheduleSample& s,
                                                 const Constellation& c) {
    if (s.singular || s.sigma <= 0.0)
        throw std::invalid_argument("constellation_prior_velocity_literal: t in (0,1) only");
    ComplexGrid mean = constellation_posterior_mean(d, s.alpha, s.sigma, c);
    ComplexGrid out(d.rows(), d.cols());
    const double inv_var = 1.0 / (s.sigma * s.sigma);
    for (size_t i = 0; i < d.size(); ++i)
        out[i] = s.drift * d[i] - s.kappa * (s.alpha * mean[i] - d[i]) * inv_var;
    return out;
}

}  // namespace cfmrx
