#include "nfvsim/mlp.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace nfvsim {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

Mlp::Mlp(std::vector<int> layer_sizes, OutputActivation out_act, std::mt19937_64& rng)
    : sizes_(std::move(layer_sizes)), out_act_(out_act) {
  if (sizes_.size() < 2) throw std::invalid_argument("need at least input and output layers");
  for (int s : sizes_) {
    if (s < 1) throw std::invalid_argument("layer sizes must be positive");
  }
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    int fan_in = sizes_[l];
    int fan_out = sizes_[l + 1];
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> init(-bound, bound);
    std::vector<double> w(static_cast<std::size_t>(fan_out) * fan_in);
    for (auto& x : w) x = init(rng);
    w_.push_back(std::move(w));
    b_.push_back(std::vector<double>(fan_out, 0.0));
    gw_.push_back(std::vector<double>(static_cast<std::size_t>(fan_out) * fan_in, 0.0));
    gb_.push_back(std::vector<double>(fan_out, 0.0));
  }
}

std::vector<int> Mlp::default_layout(int input, int output) {
  std::vector<int> sizes{input};
  for (int i = 0; i < 6; ++i) sizes.push_back(300);
  sizes.push_back(output);
  return sizes;
}

std::vector<double> Mlp::forward(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != sizes_.front()) {
    throw std::invalid_argument("input size mismatch");
  }
  std::vector<double> a = x;
  const std::size_t layers = w_.size();
  for (std::size_t l = 0; l < layers; ++l) {
    int in = sizes_[l], out = sizes_[l + 1];
    std::vector<double> next(out);
    for (int j = 0; j < out; ++j) {
      double z = b_[l][j];
      const double* row = &w_[l][static_cast<std::size_t>(j) * in];
      for (int k = 0; k < in; ++k) z += row[k] * a[k];
      bool last = l + 1 == layers;
      next[j] = (last && out_act_ == OutputActivation::Identity) ? z : sigmoid(z);
    }
    a = std::move(next);
  }
  return a;
}

std::vector<double> Mlp::forward_train(const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != sizes_.front()) {
    throw std::invalid_argument("input size mismatch");
  }
  acts_.assign(1, x);
  zs_.clear();
  const std::size_t layers = w_.size();
  for (std::size_t l = 0; l < layers; ++l) {
    int in = sizes_[l], out = sizes_[l + 1];
    std::vector<double> z(out);
    std::vector<double> a(out);
    for (int j = 0; j < out; ++j) {
      double s = b_[l][j];
      const double* row = &w_[l][static_cast<std::size_t>(j) * in];
      const std::vector<double>& prev = acts_.back();
      for (int k = 0; k < in; ++k) s += row[k] * prev[k];
      z[j] = s;
      bool last = l + 1 == layers;
      a[j] = (last && out_act_ == OutputActivation::Identity) ? s : sigmoid(s);
    }
    zs_.push_back(std::move(z));
    acts_.push_back(std::move(a));
  }
  cached_ = true;
  return acts_.back();
}

std::vector<double> Mlp::backward(const std::vector<double>& output_grad) {
  if (!cached_) throw std::logic_error("backward without cached forward");
  if (static_cast<int>(output_grad.size()) != sizes_.back()) {
    throw std::invalid_argument("output gradient size mismatch");
  }
  const std::size_t layers = w_.size();
  std::vector<double> delta = output_grad;
  // output layer activation derivative
  if (out_act_ == OutputActivation::Sigmoid) {
    for (std::size_t j = 0; j < delta.size(); ++j) {
      double a = acts_[layers][j];
      delta[j] *= a * (1.0 - a);
    }
  }
  for (std::size_t li = layers; li-- > 0;) {
    int in = sizes_[li], out = sizes_[li + 1];
    const std::vector<double>& prev = acts_[li];
    for (int j = 0; j < out; ++j) {
      double d = delta[j];
      gb_[li][j] += d;
      double* grow = &gw_[li][static_cast<std::size_t>(j) * in];
      for (int k = 0; k < in; ++k) grow[k] += d * prev[k];
    }
    std::vector<double> prev_delta(in, 0.0);
    for (int j = 0; j < out; ++j) {
      double d = delta[j];
      const double* row = &w_[li][static_cast<std::size_t>(j) * in];
      for (int k = 0; k < in; ++k) prev_delta[k] += row[k] * d;
    }
    if (li > 0) {
      for (int k = 0; k < in; ++k) {
        double a = acts_[li][k];
        prev_delta[k] *= a * (1.0 - a);  // hidden layers are sigmoid
      }
    }
    delta = std::move(prev_delta);
  }
  cached_ = false;
  return delta;  // gradient w.r.t. the input vector
}

void Mlp::zero_grad() {
  for (auto& g : gw_) std::fill(g.begin(), g.end(), 0.0);
  for (auto& g : gb_) std::fill(g.begin(), g.end(), 0.0);
}

void Mlp::scale_grad(double s) {
  for (auto& g : gw_)
    for (auto& x : g) x *= s;
  for (auto& g : gb_)
    for (auto& x : g) x *= s;
}

void Mlp::copy_from(const Mlp& other) {
  sizes_ = other.sizes_;
  out_act_ = other.out_act_;
  w_ = other.w_;
  b_ = other.b_;
  gw_ = other.gw_;
  gb_ = other.gb_;
  cached_ = false;
}

void Mlp::soft_update_from(const Mlp& online, double tau) {
  if (sizes_ != online.sizes_) throw std::invalid_argument("layout mismatch in soft update");
  for (std::size_t l = 0; l < w_.size(); ++l) {
    for (std::size_t i = 0; i < w_[l].size(); ++i) {
      w_[l][i] += tau * (online.w_[l][i] - w_[l][i]);
    }
    for (std::size_t i = 0; i < b_[l].size(); ++i) {
      b_[l][i] += tau * (online.b_[l][i] - b_[l][i]);
    }
  }
}

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (const auto& w : w_) n += w.size();
  for (const auto& b : b_) n += b.size();
  return n;
}

void Mlp::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out.precision(17);
  out << "mlpckpt v1\n";
  out << sizes_.size();
  for (int s : sizes_) out << ' ' << s;
  out << '\n' << (out_act_ == OutputActivation::Sigmoid ? "sigmoid" : "identity") << '\n';
  for (std::size_t l = 0; l < w_.size(); ++l) {
    for (double x : w_[l]) out << x << '\n';
    for (double x : b_[l]) out << x << '\n';
  }
}

Mlp Mlp::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for read: " + path);
  std::string magic, version;
  in >> magic >> version;
  if (magic != "mlpckpt" || version != "v1") throw std::runtime_error("bad checkpoint header");
  std::size_t n;
  in >> n;
  Mlp net;
  net.sizes_.resize(n);
  for (auto& s : net.sizes_) in >> s;
  std::string act;
  in >> act;
  net.out_act_ = act == "identity" ? OutputActivation::Identity : OutputActivation::Sigmoid;
  for (std::size_t l = 0; l + 1 < n; ++l) {
    std::size_t wn = static_cast<std::size_t>(net.sizes_[l + 1]) * net.sizes_[l];
    std::vector<double> w(wn), b(net.sizes_[l + 1]);
    for (auto& x : w) in >> x;
    for (auto& x : b) in >> x;
    net.w_.push_back(std::move(w));
    net.b_.push_back(std::move(b));
    net.gw_.push_back(std::vector<double>(wn, 0.0));
    net.gb_.push_back(std::vector<double>(net.sizes_[l + 1], 0.0));
  }
  if (!in) throw std::runtime_error("truncated checkpoint: " + path);
  return net;
}

AdamState::AdamState(const Mlp& net) {
  for (const auto& w : net.weights()) {
    mw.push_back(std::vector<double>(w.size(), 0.0));
    vw.push_back(std::vector<double>(w.size(), 0.0));
  }
  for (const auto& b : net.biases()) {
    mb.push_back(std::vector<double>(b.size(), 0.0));
    vb.push_back(std::vector<double>(b.size(), 0.0));
  }
}

void adam_step(Mlp& net, AdamState& st, double lr) {
  auto& gw = net.weight_grads();
  auto& gb = net.bias_grads();
  for (const auto& g : gw)
    for (double x : g)
      if (!std::isfinite(x)) throw std::runtime_error("non-finite weight gradient");
  for (const auto& g : gb)
    for (double x : g)
      if (!std::isfinite(x)) throw std::runtime_error("non-finite bias gradient");

  ++st.step;
  double bc1 = 1.0 - std::pow(st.beta1, st.step);
  double bc2 = 1.0 - std::pow(st.beta2, st.step);
  auto update = [&](std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                    std::vector<double>& v) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = st.beta1 * m[i] + (1.0 - st.beta1) * g[i];
      v[i] = st.beta2 * v[i] + (1.0 - st.beta2) * g[i] * g[i];
      double mhat = m[i] / bc1;
      double vhat = v[i] / bc2;
      p[i] -= lr * mhat / (std::sqrt(vhat) + st.eps);
    }
  };
  auto& w = net.weights();
  auto& b = net.biases();
  for (std::size_t l = 0; l < w.size(); ++l) {
    update(w[l], gw[l], st.mw[l], st.vw[l]);
    update(b[l], gb[l], st.mb[l], st.vb[l]);
  }
}

}  // namespace nfvsim
