#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "tdjsarc/rng.hpp"

namespace tdjsarc {

// Fully connected network with tanh hidden layers and a linear output layer.
// Parameters live in one flat vector (per layer: W column-major, then b) so
// optimizers, checkpoints and gradient checks can treat them uniformly.
// Batches are column-major: one sample per column.
class Mlp {
public:
  Mlp() = default;

  explicit Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need input and output sizes");
    int off = 0;
    for (std::size_t k = 0; k + 1 < sizes_.size(); ++k) {
      if (sizes_[k] < 1 || sizes_[k + 1] < 1) throw std::invalid_argument("Mlp: layer sizes must be positive");
      w_off_.push_back(off);
      off += sizes_[k + 1] * sizes_[k];
      b_off_.push_back(off);
      off += sizes_[k + 1];
    }
    num_params_ = off;
  }

  const std::vector<int>& sizes() const { return sizes_; }
  int num_params() const { return num_params_; }
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }

  struct Cache {
    std::vector<Eigen::MatrixXd> acts;  // acts[0] = input, acts[k] = output of layer k
  };

  // Gaussian init with variance gain^2 / fan_in; the output layer uses out_gain.
  Eigen::VectorXd init(Rng& rng, double hidden_gain, double out_gain) const {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(num_params_);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int k = 0; k < num_layers(); ++k) {
      const double g = (k + 1 == num_layers() ? out_gain : hidden_gain) / std::sqrt(static_cast<double>(sizes_[k]));
      for (int i = 0; i < sizes_[k + 1] * sizes_[k]; ++i) p[w_off_[k] + i] = g * normal(rng);
    }
    return p;
  }

  Eigen::MatrixXd forward(const Eigen::VectorXd& params, const Eigen::MatrixXd& x, Cache* cache = nullptr) const {
    Eigen::MatrixXd a = x;
    if (cache) {
      cache->acts.clear();
      cache->acts.push_back(a);
    }
    for (int k = 0; k < num_layers(); ++k) {
      Eigen::MatrixXd z = (weight(params, k) * a).colwise() + bias(params, k);
      if (k + 1 < num_layers()) z = z.array().tanh().matrix();
      a = std::move(z);
      if (cache) cache->acts.push_back(a);
    }
    return a;
  }

  // Gradient of a scalar loss w.r.t. the flat parameters, given dL/d(output).
  Eigen::VectorXd backward(const Eigen::VectorXd& params, const Cache& cache, const Eigen::MatrixXd& d_out) const {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(num_params_);
    Eigen::MatrixXd dz = d_out;
    for (int k = num_layers() - 1; k >= 0; --k) {
      const Eigen::MatrixXd& a_prev = cache.acts[static_cast<std::size_t>(k)];
      Eigen::Map<Eigen::MatrixXd>(grad.data() + w_off_[k], sizes_[k + 1], sizes_[k]) = dz * a_prev.transpose();
      Eigen::Map<Eigen::VectorXd>(grad.data() + b_off_[k], sizes_[k + 1]) = dz.rowwise().sum();
      if (k > 0) {
        Eigen::MatrixXd da = weight(params, k).transpose() * dz;
        dz = (da.array() * (1.0 - a_prev.array().square())).matrix();
      }
    }
    return grad;
  }

private:
  Eigen::Map<const Eigen::MatrixXd> weight(const Eigen::VectorXd& p, int k) const {
    return {p.data() + w_off_[k], sizes_[k + 1], sizes_[k]};
  }
  Eigen::Map<const Eigen::VectorXd> bias(const Eigen::VectorXd& p, int k) const {
    return {p.data() + b_off_[k], sizes_[k + 1]};
  }

  std::vector<int> sizes_;
  std::vector<int> w_off_;
  std::vector<int> b_off_;
  int num_params_ = 0;
};

// Adaptive-moment optimizer over a flat parameter vector.
struct Adam {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long t = 0;

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr) {
    if (m.size() != params.size()) {
      m = Eigen::VectorXd::Zero(params.size());
      v = Eigen::VectorXd::Zero(params.size());
      t = 0;
    }
    ++t;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    params.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }
};

}  // namespace tdjsarc
