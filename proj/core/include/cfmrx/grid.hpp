// Dense complex grids over the (subcarrier, OFDM-symbol) plane and the
// per-(rx-antenna, layer) channel tensor built from them.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cfmrx {

using cplx = std::complex<double>;

// One N_S x N_T grid of baseband amplitudes, row-major with subcarriers as rows.
class ComplexGrid {
  public:
    ComplexGrid() = default;
    ComplexGrid(int rows, int cols) : rows_(rows), cols_(cols), data_(size_t(rows) * cols) {
        if (rows < 1 || cols < 1) throw std::invalid_argument("ComplexGrid: dims must be >= 1");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return data_.size(); }

    cplx& operator()(int s, int n) { return data_[size_t(s) * cols_ + n]; }
    const cplx& operator()(int s, int n) const { return data_[size_t(s) * cols_ + n]; }
    cplx& operator[](size_t i) { return data_[i]; }
    const cplx& operator[](size_t i) const { return data_[i]; }

    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }

    bool same_shape(const ComplexGrid& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    void fill(cplx v) { std::fill(data_.begin(), data_.end(), v); }

    double squared_norm() const {
        double acc = 0;
        for (const cplx& v : data_) acc += std::norm(v);
        return acc;
    }

    bool all_finite() const {
        for (const cplx& v : data_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<cplx> data_;
};

// Real-valued grid, used for pilot/data masks.
class RealGrid {
  public:
    RealGrid() = default;
    RealGrid(int rows, int cols, double v = 0.0) : rows_(rows), cols_(cols), data_(size_t(rows) * cols, v) {
        if (rows < 1 || cols < 1) throw std::invalid_argument("RealGrid: dims must be >= 1");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return data_.size(); }

    double& operator()(int s, int n) { return data_[size_t(s) * cols_ + n]; }
    const double& operator()(int s, int n) const { return data_[size_t(s) * cols_ + n]; }
    double& operator[](size_t i) { return data_[i]; }
    const double& operator[](size_t i) const { return data_[i]; }

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

// Per-layer collections (data grids D_l, pilot grids P_l, transmit grids X_l).
using LayerGrids = std::vector<ComplexGrid>;

// Channel tensor H indexed by (rx antenna, layer); each slice is an N_S x N_T grid.
struct ChannelTensor {
    int n_rx = 0;
    int n_layers = 0;
    std::vector<ComplexGrid> slices;

    ChannelTensor() = default;
    ChannelTensor(int rx, int layers, int rows, int cols)
        : n_rx(rx), n_layers(layers), slices(size_t(rx) * layers, ComplexGrid(rows, cols)) {}

    ComplexGrid& at(int r, int l) { return slices[size_t(r) * n_layers + l]; }
    const ComplexGrid& at(int r, int l) const { return slices[size_t(r) * n_layers + l]; }

    double squared_norm() const {
        double acc = 0;
        for (const auto& g : slices) acc += g.squared_norm();
        return acc;
    }

    bool all_finite() const {
        for (const auto& g : slices)
            if (!g.all_finite()) return false;
        return true;
    }
};

}  // namespace cfmrx
