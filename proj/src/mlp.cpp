#include "asv/mlp.hpp"

#include <stdexcept>

namespace asv {

Mlp::Mlp(int input, const std::vector<int>& hidden, int output)
    : input_(input), output_(output) {
  dims_.push_back(input);
  for (int h : hidden) dims_.push_back(h);
  dims_.push_back(output);
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    weights.emplace_back(Eigen::MatrixXd::Zero(dims_[l + 1], dims_[l]));
    biases.emplace_back(Eigen::VectorXd::Zero(dims_[l + 1]));
  }
}

namespace {

Eigen::MatrixXd orthogonal(int rows, int cols, Rng& rng) {
  const int n = std::max(rows, cols);
  const int m = std::min(rows, cols);
  Eigen::MatrixXd g(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  for (int j = 0; j < m; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return rows >= cols ? q : Eigen::MatrixXd(q.transpose());
}

}  // namespace

void Mlp::init_orthogonal(Rng& rng, double hidden_gain, double output_gain) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const double gain = (l + 1 == weights.size()) ? output_gain : hidden_gain;
    weights[l] = gain * orthogonal(static_cast<int>(weights[l].rows()),
                                   static_cast<int>(weights[l].cols()), rng);
    biases[l].setZero();
  }
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  if (x.size() != input_) throw std::invalid_argument("mlp: input dimension mismatch");
  Eigen::VectorXd h = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    h = (weights[l] * h + biases[l]).eval();
    if (l + 1 < weights.size()) h = h.array().tanh();
  }
  return h;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& X) const {
  Cache cache;
  return forward_cached(X, cache);
}

Eigen::MatrixXd Mlp::forward_cached(const Eigen::MatrixXd& X, Cache& cache) const {
  if (X.rows() != input_) throw std::invalid_argument("mlp: input dimension mismatch");
  cache.activations.clear();
  cache.activations.push_back(X);
  Eigen::MatrixXd h = X;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    h = ((weights[l] * h).colwise() + biases[l]).eval();
    if (l + 1 < weights.size()) h = h.array().tanh();
    cache.activations.push_back(h);
  }
  return h;
}

void Mlp::backward(const Cache& cache, const Eigen::MatrixXd& d_output, Mlp& grads) const {
  Eigen::MatrixXd delta = d_output;
  for (int l = static_cast<int>(weights.size()) - 1; l >= 0; --l) {
    grads.weights[l] += delta * cache.activations[l].transpose();
    grads.biases[l] += delta.rowwise().sum();
    if (l > 0) {
      delta = (weights[l].transpose() * delta).eval();
      delta.array() *= 1.0 - cache.activations[l].array().square();
    }
  }
}

Mlp Mlp::zeros_like() const {
  Mlp z = *this;
  z.set_zero();
  return z;
}

void Mlp::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

int Mlp::param_count() const {
  int n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l)
    n += static_cast<int>(weights[l].size() + biases[l].size());
  return n;
}

void Mlp::append_flat(Eigen::VectorXd& out, int& offset) const {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const auto& w = weights[l];
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) out(offset++) = w(i, j);
    for (Eigen::Index i = 0; i < biases[l].size(); ++i) out(offset++) = biases[l](i);
  }
}

void Mlp::read_flat(const Eigen::VectorXd& in, int& offset) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    auto& w = weights[l];
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = in(offset++);
    for (Eigen::Index i = 0; i < biases[l].size(); ++i) biases[l](i) = in(offset++);
  }
}

}  // namespace asv
