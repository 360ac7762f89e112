#include "cfmrx/velocity_net.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "cfmrx/rng.hpp"

namespace cfmrx {

namespace {

constexpr char kMagic[4] = {'C', 'F', 'M', 'W'};
constexpr uint32_t kVersion = 2;

// Training samples below this time are skipped; the clean-state map the net
// represents is smooth there and the velocity conversion restores the 1/t
// behaviour analytically.
constexpr double kTrainTimeFloor = 0.03;

inline float silu(float x) { return x / (1.0f + std::exp(-x)); }

inline float silu_grad(float x) {
    float s = 1.0f / (1.0f + std::exp(-x));
    return s * (1.0f + x * (1.0f - s));
}

struct AdamState {
    std::vector<Eigen::MatrixXf> m, v;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long step = 0;

    void init(const std::vector<Eigen::MatrixXf*>& params) {
        for (const auto* p : params) {
            m.push_back(Eigen::MatrixXf::Zero(p->rows(), p->cols()));
            v.push_back(Eigen::MatrixXf::Zero(p->rows(), p->cols()));
        }
    }

    void update(const std::vector<Eigen::MatrixXf*>& params,
                const std::vector<const Eigen::MatrixXf*>& grads, double lr) {
        ++step;
        double c1 = 1.0 - std::pow(beta1, double(step));
        double c2 = 1.0 - std::pow(beta2, double(step));
        float rate = float(lr * std::sqrt(c2) / c1);
        for (size_t i = 0; i < params.size(); ++i) {
            m[i] = float(beta1) * m[i] + float(1 - beta1) * (*grads[i]);
            v[i] = float(beta2) * v[i] + float(1 - beta2) * grads[i]->cwiseProduct(*grads[i]);
            params[i]->array() -= rate * m[i].array() / (v[i].array().sqrt() + float(eps));
        }
    }
};

void put_u32(std::ostream& os, uint32_t v) {
    unsigned char b[4] = {(unsigned char)(v), (unsigned char)(v >> 8), (unsigned char)(v >> 16),
                          (unsigned char)(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("weights: corrupt file");
    return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}

void put_mat(std::ostream& os, const Eigen::MatrixXf& m) {
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) {
            uint32_t v;
            float f = m(r, c);
            std::memcpy(&v, &f, 4);
            put_u32(os, v);
        }
}

void get_mat(std::istream& is, Eigen::MatrixXf& m) {
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) {
            uint32_t v = get_u32(is);
            float f;
            std::memcpy(&f, &v, 4);
            m(r, c) = f;
        }
}

}  // namespace

uint64_t TrainConfig::hash() const {
    uint64_t h = 0xcbf29ce484222325ULL;
    auto fold = [&h](uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    fold(uint64_t(epochs));
    fold(uint64_t(batch_size));
    uint64_t lr_bits, tf_bits;
    std::memcpy(&lr_bits, &learning_rate, 8);
    std::memcpy(&tf_bits, &train_fraction, 8);
    fold(lr_bits);
    fold(tf_bits);
    return h;
}

VelocityNet VelocityNet::init(int grid_rows, int grid_cols, const NetConfig& cfg, uint64_t seed) {
    if (cfg.time_embed_dim < 2 || cfg.time_embed_dim % 2 != 0)
        throw std::invalid_argument("VelocityNet: time embedding dim must be even and >= 2");
    VelocityNet net;
    net.grid_rows_ = grid_rows;
    net.grid_cols_ = grid_cols;
    net.embed_dim_ = cfg.time_embed_dim;
    net.seed_ = seed;
    const int n = 2 * grid_rows * grid_cols;
    std::vector<int> sizes;
    sizes.push_back(n + cfg.time_embed_dim);
    for (int h : cfg.hidden) {
        if (h < 1) throw std::invalid_argument("VelocityNet: hidden sizes must be >= 1");
        sizes.push_back(h);
    }
    sizes.push_back(n);

    Rng rng(mix_seed(seed, 0x696e6974));
    auto gauss_mat = [&rng](int rows, int cols, float scale) {
        Eigen::MatrixXf w(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) w(r, c) = scale * float(rng.gauss());
        return w;
    };
    for (size_t i = 0; i + 1 < sizes.size(); ++i) {
        int fan_in = sizes[i], fan_out = sizes[i + 1];
        net.layer_w_.push_back(gauss_mat(fan_out, fan_in, std::sqrt(2.0f / float(fan_in))));
        net.layer_b_.push_back(Eigen::VectorXf::Zero(fan_out));
        if (i + 2 < sizes.size()) {
            // time-conditioned scale/shift for the hidden activations
            float es = std::sqrt(1.0f / float(cfg.time_embed_dim));
            net.film_scale_w_.push_back(gauss_mat(fan_out, cfg.time_embed_dim, 0.1f * es));
            net.film_scale_b_.push_back(Eigen::VectorXf::Zero(fan_out));
            net.film_shift_w_.push_back(gauss_mat(fan_out, cfg.time_embed_dim, 0.1f * es));
            net.film_shift_b_.push_back(Eigen::VectorXf::Zero(fan_out));
        }
    }
    return net;
}

size_t VelocityNet::parameter_count() const {
    size_t n = 0;
    for (const auto& w : layer_w_) n += size_t(w.size());
    for (const auto& b : layer_b_) n += size_t(b.size());
    for (const auto& w : film_scale_w_) n += 2 * size_t(w.size());
    for (const auto& b : film_scale_b_) n += 2 * size_t(b.size());
    return n;
}

Eigen::VectorXf VelocityNet::embed_time(double t) const {
    Eigen::VectorXf e(embed_dim_);
    const int half = embed_dim_ / 2;
    for (int i = 0; i < half; ++i) {
        double freq = std::pow(1000.0, half > 1 ? double(i) / double(half - 1) : 0.0);
        e[2 * i] = float(std::sin(freq * t));
        e[2 * i + 1] = float(std::cos(freq * t));
    }
    return e;
}

Eigen::MatrixXf VelocityNet::forward(const Eigen::MatrixXf& input) const {
    const size_t n_hidden = film_scale_w_.size();
    Eigen::MatrixXf emb = input.bottomRows(embed_dim_);
    Eigen::MatrixXf a = input;
    for (size_t i = 0; i < layer_w_.size(); ++i) {
        a = (layer_w_[i] * a).colwise() + layer_b_[i];
        if (i < n_hidden) {
            a = a.unaryExpr([](float x) { return silu(x); });
            Eigen::MatrixXf scale = ((film_scale_w_[i] * emb).colwise() + film_scale_b_[i]);
            Eigen::MatrixXf shift = ((film_shift_w_[i] * emb).colwise() + film_shift_b_[i]);
            a = a.cwiseProduct(scale.array().exp().matrix()) + shift;
        }
    }
    return a;
}

Eigen::VectorXf VelocityNet::pack(const ComplexGrid& g, double t) const {
    const int n = grid_rows_ * grid_cols_;
    Eigen::VectorXf x(2 * n + embed_dim_);
    for (int i = 0; i < n; ++i) {
        x[i] = float(g[i].real());
        x[n + i] = float(g[i].imag());
    }
    x.tail(embed_dim_) = embed_time(t);
    return x;
}

ComplexGrid VelocityNet::unpack(const Eigen::VectorXf& out) const {
    const int n = grid_rows_ * grid_cols_;
    ComplexGrid g(grid_rows_, grid_cols_);
    for (int i = 0; i < n; ++i) g[i] = cplx(double(out[i]), double(out[n + i]));
    return g;
}

ComplexGrid VelocityNet::denoised(const ComplexGrid& state, double t) const {
    if (state.rows() != grid_rows_ || state.cols() != grid_cols_)
        throw std::invalid_argument("VelocityNet: state shape does not match trained grid");
    return unpack(forward(pack(state, t)));
}

ComplexGrid VelocityNet::velocity(const ComplexGrid& state, double t) const {
    ComplexGrid x0 = denoised(state, t);
    const double inv = 1.0 / std::max(t, 1e-6);
    ComplexGrid v(state.rows(), state.cols());
    for (size_t i = 0; i < v.size(); ++i) v[i] = (state[i] - x0[i]) * inv;
    return v;
}

double fm_loss(const VelocityNet& net, std::span<const ComplexGrid> h0, std::span<const ComplexGrid> h1,
               std::span<const double> t) {
    if (h0.size() != h1.size() || h0.size() != t.size() || h0.empty())
        throw std::invalid_argument("fm_loss: batch extents disagree");
    double acc = 0;
    for (size_t b = 0; b < h0.size(); ++b) {
        ComplexGrid xt(h0[b].rows(), h0[b].cols());
        for (size_t i = 0; i < xt.size(); ++i)
            xt[i] = (1.0 - t[b]) * h0[b][i] + t[b] * h1[b][i];
        ComplexGrid pred = net.velocity(xt, t[b]);
        for (size_t i = 0; i < xt.size(); ++i) acc += std::norm(pred[i] - (h1[b][i] - h0[b][i]));
    }
    return acc / double(h0.size());
}

VelocityNet train_velocity_net(const ChannelDataset& dataset, const NetConfig& net_cfg,
                               const TrainConfig& train_cfg, uint64_t seed, TrainReport* report) {
    return train_velocity_net(dataset.all_grids(), dataset.frame.n_subcarriers,
                              dataset.frame.n_symbols, net_cfg, train_cfg, seed, report);
}

VelocityNet train_velocity_net(const std::vector<const ComplexGrid*>& grids, int rows, int cols,
                               const NetConfig& net_cfg, const TrainConfig& train_cfg, uint64_t seed,
                               TrainReport* report) {
    if (grids.empty()) throw std::invalid_argument("train_velocity_net: empty dataset");
    const int n = rows * cols;
    const int in_dim = 2 * n + net_cfg.time_embed_dim;
    const int emb_dim = net_cfg.time_embed_dim;

    // Deterministic shuffled split into train/val/test.
    Rng split_rng(mix_seed(seed, 0x73706c69));
    std::vector<size_t> order(grids.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[split_rng.next_u64() % i]);
    size_t n_train = std::max<size_t>(1, size_t(train_cfg.train_fraction * double(order.size())));
    size_t n_rest = order.size() - n_train;
    size_t n_val = n_rest / 2;
    size_t n_test = n_rest - n_val;

    auto pack_clean = [&](size_t idx, Eigen::Ref<Eigen::VectorXf> dst) {
        const ComplexGrid& g = *grids[idx];
        for (int i = 0; i < n; ++i) {
            dst[i] = float(g[i].real());
            dst[n + i] = float(g[i].imag());
        }
    };

    Eigen::MatrixXf train_clean(2 * n, n_train);
    for (size_t k = 0; k < n_train; ++k) pack_clean(order[k], train_clean.col(k));
    Eigen::MatrixXf val_clean(2 * n, std::max<size_t>(n_val, 1));
    for (size_t k = 0; k < n_val; ++k) pack_clean(order[n_train + k], val_clean.col(k));
    Eigen::MatrixXf test_clean(2 * n, std::max<size_t>(n_test, 1));
    for (size_t k = 0; k < n_test; ++k) pack_clean(order[n_train + n_val + k], test_clean.col(k));

    VelocityNet net = VelocityNet::init(rows, cols, net_cfg, seed);
    const size_t n_layers = net.layer_w_.size();
    const size_t n_hidden = net.film_scale_w_.size();

    std::vector<Eigen::MatrixXf*> params;
    std::vector<Eigen::MatrixXf> bias_as_mat;  // Adam treats vectors through maps below
    for (auto& w : net.layer_w_) params.push_back(&w);
    std::vector<Eigen::MatrixXf> b_store(n_layers), gs_b(n_hidden), sh_b(n_hidden);
    // represent biases as one-column matrices sharing storage at update time
    // (kept simple: copy in/out around the Adam update)
    (void)bias_as_mat;

    AdamState opt;
    std::vector<Eigen::MatrixXf> grad_w(n_layers);
    std::vector<Eigen::MatrixXf> grad_b(n_layers);
    std::vector<Eigen::MatrixXf> grad_fsw(n_hidden), grad_fsb(n_hidden);
    std::vector<Eigen::MatrixXf> grad_fhw(n_hidden), grad_fhb(n_hidden);
    std::vector<Eigen::MatrixXf> bmat(n_layers), fsb(n_hidden), fhb(n_hidden);
    for (size_t i = 0; i < n_layers; ++i) bmat[i] = net.layer_b_[i];
    for (size_t i = 0; i < n_hidden; ++i) {
        fsb[i] = net.film_scale_b_[i];
        fhb[i] = net.film_shift_b_[i];
    }
    std::vector<Eigen::MatrixXf*> all_params;
    std::vector<const Eigen::MatrixXf*> all_grads;
    for (size_t i = 0; i < n_layers; ++i) {
        all_params.push_back(&net.layer_w_[i]);
        all_params.push_back(&bmat[i]);
    }
    for (size_t i = 0; i < n_hidden; ++i) {
        all_params.push_back(&net.film_scale_w_[i]);
        all_params.push_back(&fsb[i]);
        all_params.push_back(&net.film_shift_w_[i]);
        all_params.push_back(&fhb[i]);
    }
    opt.init(all_params);

    const int batch = std::max(1, train_cfg.batch_size);

    Rng val_rng(mix_seed(seed, 0x76616c69));
    Eigen::MatrixXf val_noise(2 * n, std::max<size_t>(n_val, 1));
    std::vector<double> val_t(std::max<size_t>(n_val, 1));
    for (size_t k = 0; k < n_val; ++k) {
        for (int i = 0; i < 2 * n; ++i) val_noise(i, k) = float(val_rng.gauss() / std::sqrt(2.0));
        val_t[k] = kTrainTimeFloor + (1.0 - kTrainTimeFloor) * val_rng.uniform();
    }

    auto eval_loss = [&](const Eigen::MatrixXf& clean, const Eigen::MatrixXf& noise,
                         const std::vector<double>& ts, size_t count) {
        if (count == 0) return 0.0;
        Eigen::MatrixXf x(in_dim, count);
        Eigen::MatrixXf target(2 * n, count);
        for (size_t k = 0; k < count; ++k) {
            float a = float(1.0 - ts[k]), s = float(ts[k]);
            x.col(k).head(2 * n) = a * clean.col(k) + s * noise.col(k);
            x.col(k).tail(emb_dim) = net.embed_time(ts[k]);
            target.col(k) = noise.col(k) - clean.col(k);
        }
        Eigen::MatrixXf x0 = net.forward(x);
        double acc = 0;
        for (size_t k = 0; k < count; ++k) {
            float inv = float(1.0 / std::max(ts[k], 1e-6));
            acc += double(
                ((x.col(k).head(2 * n) - x0.col(k)) * inv - target.col(k)).squaredNorm());
        }
        return acc / double(count);
    };

    Rng train_rng(mix_seed(seed, 0x74726169));
    std::vector<size_t> idx(n_train);
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;

    std::vector<Eigen::MatrixXf> act(n_layers + 1), pre(n_layers), gated(n_hidden), scale(n_hidden);
    if (report) {
        report->train_loss.clear();
        report->val_loss.clear();
    }

    for (int epoch = 0; epoch < train_cfg.epochs; ++epoch) {
        double lr = train_cfg.learning_rate * 0.5 *
                    (1.0 + std::cos(std::numbers::pi * double(epoch) / double(train_cfg.epochs)));
        for (size_t i = idx.size(); i > 1; --i)
            std::swap(idx[i - 1], idx[train_rng.next_u64() % i]);

        double epoch_loss = 0;
        size_t epoch_count = 0;
        for (size_t start = 0; start < n_train; start += batch) {
            size_t b = std::min<size_t>(batch, n_train - start);
            Eigen::MatrixXf x(in_dim, b), target(2 * n, b);
            Eigen::VectorXf inv_t(b);
            for (size_t k = 0; k < b; ++k) {
                double t = kTrainTimeFloor + (1.0 - kTrainTimeFloor) * train_rng.uniform();
                Eigen::VectorXf noise(2 * n);
                for (int i = 0; i < 2 * n; ++i) noise[i] = float(train_rng.gauss() / std::sqrt(2.0));
                x.col(k).head(2 * n) =
                    float(1.0 - t) * train_clean.col(idx[start + k]) + float(t) * noise;
                x.col(k).tail(emb_dim) = net.embed_time(t);
                target.col(k) = noise - train_clean.col(idx[start + k]);
                inv_t[k] = float(1.0 / t);
            }
            Eigen::MatrixXf emb = x.bottomRows(emb_dim);

            act[0] = x;
            for (size_t i = 0; i < n_layers; ++i) {
                pre[i] = (net.layer_w_[i] * act[i]).colwise() + Eigen::VectorXf(bmat[i].col(0));
                if (i < n_hidden) {
                    gated[i] = pre[i].unaryExpr([](float v) { return silu(v); });
                    scale[i] = ((net.film_scale_w_[i] * emb).colwise() +
                                Eigen::VectorXf(fsb[i].col(0)))
                                   .array()
                                   .exp()
                                   .matrix();
                    act[i + 1] = gated[i].cwiseProduct(scale[i]) +
                                 ((net.film_shift_w_[i] * emb).colwise() +
                                  Eigen::VectorXf(fhb[i].col(0)));
                } else {
                    act[i + 1] = pre[i];
                }
            }

            // velocity residuals: ((x - x0)/t - target) per column
            Eigen::MatrixXf resid(2 * n, b);
            double batch_loss = 0;
            for (size_t k = 0; k < b; ++k) {
                resid.col(k) =
                    (x.col(k).head(2 * n) - act[n_layers].col(k)) * inv_t[k] - target.col(k);
                batch_loss += double(resid.col(k).squaredNorm());
            }
            batch_loss /= double(b);
            if (!std::isfinite(batch_loss))
                throw std::runtime_error("train_velocity_net: loss diverged (NaN/Inf) at epoch " +
                                         std::to_string(epoch));
            epoch_loss += batch_loss * double(b);
            epoch_count += b;

            // dL/dx0 = -2/(B) * resid / t
            Eigen::MatrixXf delta(2 * n, b);
            for (size_t k = 0; k < b; ++k)
                delta.col(k) = (-2.0f / float(b)) * inv_t[k] * resid.col(k);

            for (size_t i = n_layers; i-- > 0;) {
                grad_w[i].noalias() = delta * act[i].transpose();
                grad_b[i] = delta.rowwise().sum();
                if (i == 0) break;
                Eigen::MatrixXf up = net.layer_w_[i].transpose() * delta;  // d wrt act[i]
                size_t hid = i - 1;
                // act[i] = gated o scale + shift
                Eigen::MatrixXf dgated = up.cwiseProduct(scale[hid]);
                Eigen::MatrixXf dscale_pre = up.cwiseProduct(gated[hid]).cwiseProduct(scale[hid]);
                grad_fsw[hid].noalias() = dscale_pre * emb.transpose();
                grad_fsb[hid] = dscale_pre.rowwise().sum();
                grad_fhw[hid].noalias() = up * emb.transpose();
                grad_fhb[hid] = up.rowwise().sum();
                delta = dgated.cwiseProduct(
                    pre[hid].unaryExpr([](float v) { return silu_grad(v); }));
            }

            std::vector<const Eigen::MatrixXf*> gl;
            for (size_t i = 0; i < n_layers; ++i) {
                gl.push_back(&grad_w[i]);
                gl.push_back(&grad_b[i]);
            }
            for (size_t i = 0; i < n_hidden; ++i) {
                gl.push_back(&grad_fsw[i]);
                gl.push_back(&grad_fsb[i]);
                gl.push_back(&grad_fhw[i]);
                gl.push_back(&grad_fhb[i]);
            }
            opt.update(all_params, gl, lr);
        }

        if (report) {
            // refresh the vector views after the matrix-form update
            for (size_t i = 0; i < n_layers; ++i) net.layer_b_[i] = bmat[i].col(0);
            for (size_t i = 0; i < n_hidden; ++i) {
                net.film_scale_b_[i] = fsb[i].col(0);
                net.film_shift_b_[i] = fhb[i].col(0);
            }
            report->train_loss.push_back(epoch_loss / double(epoch_count));
            report->val_loss.push_back(eval_loss(val_clean, val_noise, val_t, n_val));
        }
    }

    for (size_t i = 0; i < n_layers; ++i) net.layer_b_[i] = bmat[i].col(0);
    for (size_t i = 0; i < n_hidden; ++i) {
        net.film_scale_b_[i] = fsb[i].col(0);
        net.film_shift_b_[i] = fhb[i].col(0);
    }

    if (report) {
        Rng test_rng(mix_seed(seed, 0x74657374));
        Eigen::MatrixXf test_noise(2 * n, std::max<size_t>(n_test, 1));
        std::vector<double> test_t(std::max<size_t>(n_test, 1));
        for (size_t k = 0; k < n_test; ++k) {
            for (int i = 0; i < 2 * n; ++i) test_noise(i, k) = float(test_rng.gauss() / std::sqrt(2.0));
            test_t[k] = kTrainTimeFloor + (1.0 - kTrainTimeFloor) * test_rng.uniform();
        }
        report->test_loss = eval_loss(test_clean, test_noise, test_t, n_test);
    }
    return net;
}

void VelocityNet::save(const std::string& path, uint64_t train_cfg_hash) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("weights: cannot open for writing: " + path);
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u32(os, uint32_t(grid_rows_));
    put_u32(os, uint32_t(grid_cols_));
    put_u32(os, uint32_t(embed_dim_));
    put_u32(os, uint32_t(layer_w_.size()));
    for (const auto& w : layer_w_) {
        put_u32(os, uint32_t(w.rows()));
        put_u32(os, uint32_t(w.cols()));
    }
    put_u32(os, uint32_t(seed_));
    put_u32(os, uint32_t(seed_ >> 32));
    put_u32(os, uint32_t(train_cfg_hash));
    put_u32(os, uint32_t(train_cfg_hash >> 32));
    for (size_t i = 0; i < layer_w_.size(); ++i) {
        put_mat(os, layer_w_[i]);
        put_mat(os, layer_b_[i]);
    }
    for (size_t i = 0; i < film_scale_w_.size(); ++i) {
        put_mat(os, film_scale_w_[i]);
        put_mat(os, film_scale_b_[i]);
        put_mat(os, film_shift_w_[i]);
        put_mat(os, film_shift_b_[i]);
    }
    if (!os) throw std::runtime_error("weights: write failed: " + path);
}

VelocityNet VelocityNet::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("weights: cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("weights: bad magic: " + path);
    if (get_u32(is) != kVersion) throw std::runtime_error("weights: unsupported version");

    VelocityNet net;
    net.grid_rows_ = int(get_u32(is));
    net.grid_cols_ = int(get_u32(is));
    net.embed_dim_ = int(get_u32(is));
    uint32_t n_layers = get_u32(is);
    std::vector<std::pair<uint32_t, uint32_t>> dims(n_layers);
    for (auto& d : dims) {
        d.first = get_u32(is);
        d.second = get_u32(is);
    }
    uint64_t seed_lo = get_u32(is), seed_hi = get_u32(is);
    net.seed_ = seed_lo | (seed_hi << 32);
    get_u32(is);  // training-config hash, informational
    get_u32(is);

    for (auto& d : dims) {
        Eigen::MatrixXf w(d.first, d.second);
        get_mat(is, w);
        Eigen::MatrixXf b(d.first, 1);
        get_mat(is, b);
        net.layer_w_.push_back(std::move(w));
        net.layer_b_.push_back(Eigen::VectorXf(b.col(0)));
    }
    for (size_t i = 0; i + 1 < dims.size(); ++i) {
        uint32_t h = dims[i].first;
        Eigen::MatrixXf sw(h, net.embed_dim_), sb(h, 1), hw(h, net.embed_dim_), hb(h, 1);
        get_mat(is, sw);
        get_mat(is, sb);
        get_mat(is, hw);
        get_mat(is, hb);
        net.film_scale_w_.push_back(std::move(sw));
        net.film_scale_b_.push_back(Eigen::VectorXf(sb.col(0)));
        net.film_shift_w_.push_back(std::move(hw));
        net.film_shift_b_.push_back(Eigen::VectorXf(hb.col(0)));
    }
    is.peek();
    if (!is.eof()) throw std::runtime_error("weights: payload longer than header describes");
    return net;
}

}  // namespace cfmrx
