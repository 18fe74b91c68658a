#pragma once

#include <Eigen/Dense>
#include <vector>

#include "asv/common.hpp"

namespace asv {

// Fully connected network with tanh hidden layers and a linear output,
// with hand-written reverse-mode differentiation. Batches are stored
// column-wise (one sample per column).
class Mlp {
 public:
  Mlp() = default;
  Mlp(int input, const std::vector<int>& hidden, int output);

  void init_orthogonal(Rng& rng, double hidden_gain, double output_gain);

  int input_dim() const { return input_; }
  int output_dim() const { return output_; }

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& X) const;

  struct Cache {
    std::vector<Eigen::MatrixXd> activations;  // [X, h1, ..., output]
  };
  Eigen::MatrixXd forward_cached(const Eigen::MatrixXd& X, Cache& cache) const;

  // Accumulates parameter gradients into `grads` (same topology, zeroed by
  // the caller) given the loss gradient w.r.t. the output.
  void backward(const Cache& cache, const Eigen::MatrixXd& d_output, Mlp& grads) const;

  Mlp zeros_like() const;
  void set_zero();
  int param_count() const;
  void append_flat(Eigen::VectorXd& out, int& offset) const;
  void read_flat(const Eigen::VectorXd& in, int& offset);

  std::vector<Eigen::MatrixXd> weights;  // weights[l] is (dims[l+1] x dims[l])
  std::vector<Eigen::VectorXd> biases;

 private:
  int input_ = 0;
  int output_ = 0;
  std::vector<int> dims_;
};

}  // namespace asv
