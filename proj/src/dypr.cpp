#include "nfvsim/dypr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace nfvsim {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Solve the symmetric system M x = rhs by Gaussian elimination with
// partial pivoting. Throws on a (near-)singular pivot.
std::vector<double> solve_linear(std::vector<std::vector<double>> m, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    }
    if (std::fabs(m[piv][col]) < 1e-12) {
      throw std::runtime_error(
          "ridge system is singular (collinear features); use lambda > 0");
    }
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t ri = n; ri-- > 0;) {
    double s = rhs[ri];
    for (std::size_t c = ri + 1; c < n; ++c) s -= m[ri][c] * x[c];
    x[ri] = s / m[ri][ri];
  }
  return x;
}

}  // namespace

PriorityLabel make_priority_label(double value) {
  PriorityLabel l;
  l.value = value;
  l.macro_class = std::clamp(static_cast<int>(std::floor(value * 10.0 + 1e-9)), 0, 9);
  int hundredths = std::max(0, static_cast<int>(std::floor(value * 100.0 + 1e-9)));
  l.micro_class = hundredths % 10;
  return l;
}

RidgeFit ridge_fit(const std::vector<std::vector<double>>& features,
                   const std::vector<double>& targets, double lambda) {
  if (features.empty() || features.size() != targets.size()) {
    throw std::invalid_argument("empty or mismatched ridge batch");
  }
  if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
  const std::size_t m = features.size();
  const std::size_t p = features[0].size();
  std::vector<double> a_mean(p, 0.0);
  double y_mean = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (features[i].size() != p) throw std::invalid_argument("ragged feature matrix");
    for (std::size_t j = 0; j < p; ++j) a_mean[j] += features[i][j];
    y_mean += targets[i];
  }
  for (auto& v : a_mean) v /= static_cast<double>(m);
  y_mean /= static_cast<double>(m);

  // normal equations on centered data: (A'A + lambda I) w = A'y
  std::vector<std::vector<double>> ata(p, std::vector<double>(p, 0.0));
  std::vector<double> aty(p, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double aj = features[i][j] - a_mean[j];
      aty[j] += aj * (targets[i] - y_mean);
      for (std::size_t k = j; k < p; ++k) {
        ata[j][k] += aj * (features[i][k] - a_mean[k]);
      }
    }
  }
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = 0; k < j; ++k) ata[j][k] = ata[k][j];
    ata[j][j] += lambda;
  }
  RidgeFit fit;
  fit.weights = solve_linear(std::move(ata), std::move(aty));
  fit.intercept = y_mean - std::inner_product(a_mean.begin(), a_mean.end(),
                                              fit.weights.begin(), 0.0);
  return fit;
}

std::vector<std::size_t> sample_without_replacement(std::size_t pool, std::size_t take,
                                                    std::mt19937_64& rng) {
  if (take > pool) throw std::invalid_argument("sample larger than pool");
  std::vector<std::size_t> idx(pool);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t t = 0; t < take; ++t) {  // partial Fisher-Yates
    std::uniform_int_distribution<std::size_t> pick(t, pool - 1);
    std::swap(idx[t], idx[pick(rng)]);
  }
  idx.resize(take);
  return idx;
}

RidgeModel::RidgeModel(RidgeConfig cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {}

std::vector<double> RidgeModel::normalize(const std::vector<double>& raw) const {
  std::vector<double> out(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) {
    double lo = j < feat_min_.size() ? feat_min_[j] : raw[j];
    double hi = j < feat_max_.size() ? feat_max_[j] : raw[j];
    out[j] = hi > lo ? (raw[j] - lo) / (hi - lo) : 0.0;
  }
  return out;
}

double RidgeModel::ingest(const std::vector<double>& features, double observed_y) {
  for (double f : features) {
    if (!std::isfinite(f)) throw std::invalid_argument("non-finite feature");
  }
  ++ingested_;
  if (feat_min_.empty()) {
    feat_min_ = features;
    feat_max_ = features;
  } else {
    for (std::size_t j = 0; j < features.size(); ++j) {
      feat_min_[j] = std::min(feat_min_[j], features[j]);
      feat_max_[j] = std::max(feat_max_[j], features[j]);
    }
  }

  if (state_ == RidgeState::Observe &&
      static_cast<int>(buffer_.size()) >= cfg_.observation_threshold) {
    state_ = RidgeState::Train;
  }

  switch (state_) {
    case RidgeState::Observe: {
      buffer_.emplace_back(features, observed_y);
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      return u01(rng_);
    }
    case RidgeState::Train: {
      buffer_.emplace_back(features, observed_y);
      fit_on_batch(features, observed_y);
      double pred = predict(features).value;
      if (ingested_ % cfg_.check_period == 0) check_accuracy();
      return pred;
    }
    case RidgeState::Predict:
      return predict(features).value;
  }
  return 0.0;  // unreachable
}

void RidgeModel::fit_on_batch(const std::vector<double>& current_a, double current_y) {
  // Train on a uniform random batch from the non-held-out part of the
  // memory, plus the current transition.
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i + 1 < buffer_.size(); ++i) {
    if (static_cast<int>(i % cfg_.holdout_stride) != cfg_.holdout_stride - 1) pool.push_back(i);
  }
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  std::size_t take = std::min<std::size_t>(cfg_.batch_size, pool.size());
  for (std::size_t s : sample_without_replacement(pool.size(), take, rng_)) {
    x.push_back(normalize(buffer_[pool[s]].first));
    y.push_back(buffer_[pool[s]].second);
  }
  x.push_back(normalize(current_a));
  y.push_back(current_y);
  RidgeFit fit = ridge_fit(x, y, cfg_.lambda);
  weights_ = std::move(fit.weights);
  intercept_ = fit.intercept;
  fitted_ = true;
}

void RidgeModel::check_accuracy() {
  std::vector<std::pair<std::vector<double>, double>> holdout;
  for (std::size_t i = 0; i < buffer_.size(); ++i) {
    if (static_cast<int>(i % cfg_.holdout_stride) == cfg_.holdout_stride - 1) {
      holdout.push_back(buffer_[i]);
    }
  }
  if (holdout.empty()) return;
  last_accuracy_ = accuracy(holdout);
  if (last_accuracy_ >= cfg_.accuracy_target) state_ = RidgeState::Predict;
}

PriorityLabel RidgeModel::predict(const std::vector<double>& features) const {
  if (state_ == RidgeState::Observe || !fitted_) {
    throw std::logic_error("predict called before training started");
  }
  std::vector<double> x = normalize(features);
  double v = intercept_;
  for (std::size_t j = 0; j < x.size() && j < weights_.size(); ++j) v += weights_[j] * x[j];
  return make_priority_label(clamp01(v));
}

double RidgeModel::accuracy(
    const std::vector<std::pair<std::vector<double>, double>>& eval_set) const {
  if (eval_set.empty()) throw std::invalid_argument("empty eval set");
  int ok = 0;
  for (const auto& [a, y] : eval_set) {
    double pred = predict(a).value;
    if (std::fabs(pred - y) / std::max(y, 0.1) <= 0.10) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(eval_set.size());
}

void RidgeModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out.precision(17);
  out << "ridgeckpt v1\n";
  const char* st = state_ == RidgeState::Observe  ? "observe"
                   : state_ == RidgeState::Train ? "train"
                                                 : "predict";
  out << st << ' ' << cfg_.lambda << ' ' << intercept_ << ' ' << weights_.size() << '\n';
  for (double w : weights_) out << w << '\n';
  out << feat_min_.size() << '\n';
  for (std::size_t j = 0; j < feat_min_.size(); ++j) {
    out << feat_min_[j] << ' ' << feat_max_[j] << '\n';
  }
}

RidgeModel RidgeModel::load(const std::string& path, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for read: " + path);
  std::string magic, version, st;
  in >> magic >> version;
  if (magic != "ridgeckpt" || version != "v1") throw std::runtime_error("bad checkpoint header");
  RidgeConfig cfg;
  RidgeModel m(cfg, seed);
  std::size_t p, ranges;
  in >> st >> m.cfg_.lambda >> m.intercept_ >> p;
  m.weights_.resize(p);
  for (auto& w : m.weights_) in >> w;
  in >> ranges;
  m.feat_min_.resize(ranges);
  m.feat_max_.resize(ranges);
  for (std::size_t j = 0; j < ranges; ++j) in >> m.feat_min_[j] >> m.feat_max_[j];
  if (!in) throw std::runtime_error("truncated checkpoint: " + path);
  m.state_ = st == "observe" ? RidgeState::Observe
             : st == "train" ? RidgeState::Train
                             : RidgeState::Predict;
  m.fitted_ = m.state_ != RidgeState::Observe;
  return m;
}

}  // namespace nfvsim
