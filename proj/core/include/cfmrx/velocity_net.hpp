// Trainable channel-prior velocity: a feed-forward network on the flattened
// real/imag grid with a sinusoidal time embedding, trained with the
// flow-matching regression objective on channel snapshots.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cfmrx/dataset.hpp"
#include "cfmrx/frame.hpp"
#include "cfmrx/grid.hpp"
#include "cfmrx/prior.hpp"

namespace cfmrx {

struct NetConfig {
    std::vector<int> hidden{256, 256};
    int time_embed_dim = 32;  // even; sin/cos pairs with log-spaced frequencies
};

struct TrainConfig {
    int epochs = 500;
    int batch_size = 128;
    double learning_rate = 1e-3;  // cosine-annealed to zero
    double train_fraction = 0.8;  // remainder split evenly into val/test
    uint64_t hash() const;
};

struct TrainReport {
    std::vector<double> train_loss;  // per epoch
    std::vector<double> val_loss;    // per epoch
    double test_loss = 0.0;
};

// Feed-forward net with a sinusoidal time embedding and time-conditioned
// (scale/shift) hidden activations.  The network regresses the clean state
// E[H0 | H_t]; the flow velocity is recovered as (H_t - H0)/t, which keeps
// the small-t amplification analytic instead of learned.
class VelocityNet {
  public:
    VelocityNet() = default;

    static VelocityNet init(int grid_rows, int grid_cols, const NetConfig& cfg, uint64_t seed);

    int grid_rows() const { return grid_rows_; }
    int grid_cols() const { return grid_cols_; }
    int input_dim() const { return int(layer_w_.front().cols()); }
    int output_dim() const { return int(layer_w_.back().rows()); }
    int embed_dim() const { return embed_dim_; }
    uint64_t seed() const { return seed_; }
    size_t parameter_count() const;

    // Batched forward pass, one sample per column; rows are
    // [re(flat); im(flat); embedding].  Output is the predicted clean state.
    Eigen::MatrixXf forward(const Eigen::MatrixXf& input) const;

    Eigen::VectorXf embed_time(double t) const;
    Eigen::VectorXf pack(const ComplexGrid& g, double t) const;
    ComplexGrid unpack(const Eigen::VectorXf& out) const;

    ComplexGrid denoised(const ComplexGrid& state, double t) const;
    ComplexGrid velocity(const ComplexGrid& state, double t) const;

    void save(const std::string& path, uint64_t train_cfg_hash = 0) const;
    static VelocityNet load(const std::string& path);

  private:
    friend VelocityNet train_velocity_net(const std::vector<const ComplexGrid*>&, int, int,
                                          const NetConfig&, const TrainConfig&, uint64_t, TrainReport*);
    int grid_rows_ = 0, grid_cols_ = 0;
    int embed_dim_ = 0;
    uint64_t seed_ = 0;
    std::vector<Eigen::MatrixXf> layer_w_;
    std::vector<Eigen::VectorXf> layer_b_;
    std::vector<Eigen::MatrixXf> film_scale_w_, film_shift_w_;
    std::vector<Eigen::VectorXf> film_scale_b_, film_shift_b_;
};

// Mean over the batch of the squared distance between the net prediction at
// x_t = (1-t) h0 + t h1 and the straight-path target h1 - h0.
double fm_loss(const VelocityNet& net, std::span<const ComplexGrid> h0, std::span<const ComplexGrid> h1,
               std::span<const double> t);

VelocityNet train_velocity_net(const ChannelDataset& dataset, const NetConfig& net_cfg,
                               const TrainConfig& train_cfg, uint64_t seed,
                               TrainReport* report = nullptr);
VelocityNet train_velocity_net(const std::vector<const ComplexGrid*>& grids, int rows, int cols,
                               const NetConfig& net_cfg, const TrainConfig& train_cfg, uint64_t seed,
                               TrainReport* report = nullptr);

class NetVelocityField final : public ChannelVelocityField {
  public:
    explicit NetVelocityField(VelocityNet net) : net_(std::move(net)) {}
    ComplexGrid velocity(const ComplexGrid& state, double t) const override {
        return net_.velocity(state, t);
    }
    const VelocityNet& net() const { return net_; }

  private:
    VelocityNet net_;
};

}  // namespace cfmrx
