#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace nfvsim {

enum class OutputActivation { Sigmoid, Identity };

// Fixed-topology fully connected net with sigmoid hidden layers. Small by
// design: just enough machinery for the actor, critic and Q-networks.
class Mlp {
 public:
  Mlp() = default;
  // layer_sizes = {input, hidden..., output}. Weights drawn
  // U[-1/sqrt(fan_in), +1/sqrt(fan_in)].
  Mlp(std::vector<int> layer_sizes, OutputActivation out_act, std::mt19937_64& rng);

  // Published-scale layout: 6 hidden layers of 300 units.
  static std::vector<int> default_layout(int input, int output);

  std::vector<double> forward(const std::vector<double>& x) const;
  // Same as forward but caches activations for a subsequent backward().
  std::vector<double> forward_train(const std::vector<double>& x);
  // Accumulates parameter gradients for the last cached forward and returns
  // the gradient with respect to the input. Throws without a cached pass.
  std::vector<double> backward(const std::vector<double>& output_grad);

  void zero_grad();
  void scale_grad(double s);

  void copy_from(const Mlp& other);
  void soft_update_from(const Mlp& online, double tau);

  void save(const std::string& path) const;
  static Mlp load(const std::string& path);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  OutputActivation output_activation() const { return out_act_; }
  std::size_t param_count() const;

  // flat parameter/gradient access, used by Adam and the test oracles
  std::vector<std::vector<double>>& weights() { return w_; }
  std::vector<std::vector<double>>& biases() { return b_; }
  std::vector<std::vector<double>>& weight_grads() { return gw_; }
  std::vector<std::vector<double>>& bias_grads() { return gb_; }
  const std::vector<std::vector<double>>& weights() const { return w_; }
  const std::vector<std::vector<double>>& biases() const { return b_; }
  const std::vector<std::vector<double>>& weight_grads() const { return gw_; }
  const std::vector<std::vector<double>>& bias_grads() const { return gb_; }

 private:
  std::vector<int> sizes_;
  OutputActivation out_act_ = OutputActivation::Sigmoid;
  std::vector<std::vector<double>> w_, b_;    // w_[l]: sizes_[l+1] x sizes_[l], row-major
  std::vector<std::vector<double>> gw_, gb_;
  std::vector<std::vector<double>> acts_;     // cached activations, acts_[0] = input
  std::vector<std::vector<double>> zs_;       // cached pre-activations
  bool cached_ = false;
};

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<std::vector<double>> mw, vw, mb, vb;

  AdamState() = default;
  explicit AdamState(const Mlp& net);
};

// Standard Adam with bias correction. Throws on a non-finite gradient.
void adam_step(Mlp& net, AdamState& state, double lr);

}  // namespace nfvsim
