#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <random>

#include "nfvsim/dypr.hpp"
#include "nfvsim/workload.hpp"

using namespace nfvsim;

namespace {

// Independent solver for the unit tests: explicit Gauss-Jordan inversion of
// the centered normal equations, no code shared with ridge_fit's pivoted
// elimination path beyond arithmetic.
RidgeFit invert_oracle(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                       double lambda) {
  const std::size_t m = x.size(), p = x[0].size();
  std::vector<double> xm(p, 0.0);
  double ym = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < p; ++j) xm[j] += x[i][j] / m;
    ym += y[i] / m;
  }
  std::vector<std::vector<double>> a(p, std::vector<double>(2 * p, 0.0));
  std::vector<double> rhs(p, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      rhs[j] += (x[i][j] - xm[j]) * (y[i] - ym);
      for (std::size_t k = 0; k < p; ++k) a[j][k] += (x[i][j] - xm[j]) * (x[i][k] - xm[k]);
    }
  for (std::size_t j = 0; j < p; ++j) {
    a[j][j] += lambda;
    a[j][p + j] = 1.0;
  }
  for (std::size_t col = 0; col < p; ++col) {  // Gauss-Jordan, no pivoting
    double d = a[col][col];
    for (auto& v : a[col]) v /= d;
    for (std::size_t r = 0; r < p; ++r) {
      if (r == col) continue;
      double f = a[r][col];
      for (std::size_t c = 0; c < 2 * p; ++c) a[r][c] -= f * a[col][c];
    }
  }
  RidgeFit fit;
  fit.weights.assign(p, 0.0);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < p; ++k) fit.weights[j] += a[j][p + k] * rhs[k];
  fit.intercept = ym - std::inner_product(xm.begin(), xm.end(), fit.weights.begin(), 0.0);
  return fit;
}

// Gradient descent on the ridge cost itself, intercept unpenalized.
RidgeFit gd_oracle(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                   double lambda, int steps = 200000, double lr = 0.01) {
  const std::size_t m = x.size(), p = x[0].size();
  RidgeFit fit;
  fit.weights.assign(p, 0.0);
  for (int s = 0; s < steps; ++s) {
    std::vector<double> gw(p, 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double pred = fit.intercept;
      for (std::size_t j = 0; j < p; ++j) pred += fit.weights[j] * x[i][j];
      double e = pred - y[i];
      for (std::size_t j = 0; j < p; ++j) gw[j] += 2 * e * x[i][j];
      gb += 2 * e;
    }
    for (std::size_t j = 0; j < p; ++j) {
      gw[j] += 2 * lambda * fit.weights[j];
      fit.weights[j] -= lr * gw[j] / m;
    }
    fit.intercept -= lr * gb / m;
  }
  return fit;
}

}  // namespace

TEST_CASE("macro/micro decomposition") {
  auto l = make_priority_label(0.79);
  CHECK(l.macro_class == 7);
  CHECK(l.micro_class == 9);
  l = make_priority_label(0.72);
  CHECK(l.macro_class == 7);
  CHECK(l.micro_class == 2);
  l = make_priority_label(0.0);
  CHECK(l.macro_class == 0);
  CHECK(l.micro_class == 0);
  l = make_priority_label(1.0);
  CHECK(l.macro_class == 9);
}

TEST_CASE("ridge fit recovers an exact line with lambda 0") {
  auto fit = ridge_fit({{1.0}, {2.0}}, {2.0, 4.0}, 0.0);
  CHECK(fit.weights[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(fit.intercept == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("huge lambda shrinks weights to zero and intercept to mean") {
  std::vector<std::vector<double>> x{{1.0, 2.0}, {3.0, 1.0}, {2.0, 5.0}, {0.5, 0.5}};
  std::vector<double> y{1.0, 2.0, 3.0, 4.0};
  auto fit = ridge_fit(x, y, 1e9);
  double norm = std::hypot(fit.weights[0], fit.weights[1]);
  CHECK(norm < 1e-3);
  CHECK(fit.intercept == doctest::Approx(2.5).epsilon(1e-3));
}

TEST_CASE("ridge fit matches the explicit inversion oracle") {
  std::vector<std::vector<double>> x{
      {0.2, 1.1, -0.4}, {1.5, 0.3, 0.9}, {-0.7, 2.2, 1.3}, {0.9, -1.0, 0.5}, {2.1, 0.8, -1.6}};
  std::vector<double> y{0.7, 1.9, -0.3, 1.1, 2.4};
  auto fit = ridge_fit(x, y, 1.0);
  auto oracle = invert_oracle(x, y, 1.0);
  for (int j = 0; j < 3; ++j) CHECK(fit.weights[j] == doctest::Approx(oracle.weights[j]).epsilon(1e-10));
  CHECK(fit.intercept == doctest::Approx(oracle.intercept).epsilon(1e-10));
}

TEST_CASE("closed form matches gradient descent on the ridge cost") {
  std::vector<std::vector<double>> x{{0.1, 0.9}, {0.8, 0.2}, {0.4, 0.6}, {0.95, 0.35}, {0.5, 0.5}};
  std::vector<double> y{0.3, 0.8, 0.5, 0.9, 0.55};
  auto fit = ridge_fit(x, y, 0.5);
  auto gd = gd_oracle(x, y, 0.5);
  for (int j = 0; j < 2; ++j) CHECK(std::fabs(fit.weights[j] - gd.weights[j]) < 1e-4);
  CHECK(std::fabs(fit.intercept - gd.intercept) < 1e-4);
}

TEST_CASE("singular system with lambda 0 reports the collinearity") {
  // two perfectly collinear features
  std::vector<std::vector<double>> x{{1.0, 2.0}, {2.0, 4.0}, {3.0, 6.0}};
  std::vector<double> y{1.0, 2.0, 3.0};
  CHECK_THROWS_WITH_AS(ridge_fit(x, y, 0.0), doctest::Contains("lambda"), std::runtime_error);
  CHECK_NOTHROW(ridge_fit(x, y, 0.1));
}

TEST_CASE("ridge shrinkage is monotone in lambda") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 20; ++i) {
    x.push_back({u(rng), u(rng), u(rng)});
    y.push_back(0.7 * x.back()[0] - 0.2 * x.back()[1] + 0.4 * x.back()[2] + 0.05 * u(rng));
  }
  double prev = 1e18;
  for (double lambda : {0.0, 0.1, 1.0, 10.0, 100.0}) {
    auto fit = ridge_fit(x, y, lambda);
    double norm = 0.0;
    for (double w : fit.weights) norm += w * w;
    CHECK(norm <= prev + 1e-12);
    prev = norm;
  }
}

TEST_CASE("lifecycle: observe, train at the threshold, then predict") {
  RidgeConfig cfg;
  RidgeModel model(cfg, 99);
  WorkloadConfig wcfg;
  wcfg.priority_noise = 0.0;
  auto batch = generate_batch(100, 100, wcfg);
  auto features = [](const ServiceRequest& s) {
    return std::vector<double>{s.qos.delay_ms, s.qos.jitter_ms, s.qos.packet_loss};
  };

  double p0 = model.ingest(features(batch[0]), batch[0].true_priority);
  CHECK(model.state() == RidgeState::Observe);
  CHECK(model.buffer_size() == 1);
  CHECK(p0 >= 0.0);
  CHECK(p0 <= 1.0);
  CHECK_THROWS_AS(model.predict(features(batch[0])), std::logic_error);

  for (int i = 1; i < 32; ++i) model.ingest(features(batch[i]), batch[i].true_priority);
  CHECK(model.state() == RidgeState::Observe);
  model.ingest(features(batch[32]), batch[32].true_priority);  // 33rd call trains
  CHECK(model.state() == RidgeState::Train);

  int i = 33;
  while (model.state() != RidgeState::Predict && i < 100) {
    model.ingest(features(batch[i]), batch[i].true_priority);
    ++i;
  }
  CHECK(model.state() == RidgeState::Predict);
  CHECK(model.last_accuracy() >= 0.80);
  std::size_t frozen = model.buffer_size();
  model.ingest(features(batch[99]), batch[99].true_priority);
  CHECK(model.buffer_size() == frozen);  // buffer no longer grows
}

TEST_CASE("noise-free oracle is recovered perfectly after one fit") {
  RidgeConfig cfg;
  cfg.lambda = 0.0;
  RidgeModel model(cfg, 5);
  WorkloadConfig wcfg;
  wcfg.priority_noise = 0.0;
  auto batch = generate_batch(7, 64, wcfg);
  for (int i = 0; i < 34; ++i) {
    model.ingest({batch[i].qos.delay_ms, batch[i].qos.jitter_ms, batch[i].qos.packet_loss},
                 batch[i].true_priority);
  }
  REQUIRE(model.state() != RidgeState::Observe);
  std::vector<std::pair<std::vector<double>, double>> eval;
  for (int i = 34; i < 64; ++i) {
    eval.push_back({{batch[i].qos.delay_ms, batch[i].qos.jitter_ms, batch[i].qos.packet_loss},
                    batch[i].true_priority});
  }
  CHECK(model.accuracy(eval) == doctest::Approx(1.0));
}

TEST_CASE("accuracy metric counts the 10 percent relative band") {
  RidgeConfig cfg;
  RidgeModel model(cfg, 1);
  // feed a tiny fit so predict works, then evaluate hand-built sets
  for (int i = 0; i < 40; ++i) {
    double a = 0.1 + 0.02 * i;
    model.ingest({a}, a);  // y = x exactly
  }
  REQUIRE(model.state() != RidgeState::Observe);
  // predictions identical to targets
  std::vector<std::pair<std::vector<double>, double>> same;
  for (int i = 0; i < 10; ++i) {
    double a = 0.15 + 0.05 * i;
    same.push_back({{a}, model.predict({a}).value});
  }
  CHECK(model.accuracy(same) == doctest::Approx(1.0));
  // everything off by 50 percent
  std::vector<std::pair<std::vector<double>, double>> off;
  for (auto& [a, y] : same) off.push_back({a, y * 1.5 + 0.2});
  CHECK(model.accuracy(off) == doctest::Approx(0.0));
}

TEST_CASE("prediction clamps to [0,1] and labels derive from the value") {
  RidgeConfig cfg;
  RidgeModel model(cfg, 2);
  for (int i = 0; i < 40; ++i) {
    double a = static_cast<double>(i);
    model.ingest({a}, a * 0.1);  // targets run past 1.0
  }
  REQUIRE(model.state() != RidgeState::Observe);
  auto label = model.predict({39.0});
  CHECK(label.value <= 1.0);
  CHECK(label.value >= 0.0);
  CHECK(label.macro_class == make_priority_label(label.value).macro_class);
}

TEST_CASE("checkpoint round-trips the trained model") {
  RidgeConfig cfg;
  RidgeModel model(cfg, 3);
  WorkloadConfig wcfg;
  auto batch = generate_batch(21, 50, wcfg);
  for (const auto& s : batch) {
    model.ingest({s.qos.delay_ms, s.qos.jitter_ms, s.qos.packet_loss}, s.true_priority);
  }
  REQUIRE(model.state() != RidgeState::Observe);
  std::string path = "/tmp/nfvsim_ridge_ckpt_test.txt";
  model.save(path);
  auto loaded = RidgeModel::load(path);
  CHECK(loaded.state() == model.state());
  std::vector<double> probe{50.0, 10.0, 0.02};
  CHECK(loaded.predict(probe).value == doctest::Approx(model.predict(probe).value).epsilon(1e-12));
  std::remove(path.c_str());
}

TEST_CASE("memory batch sampling is uniform (chi-square at 0.01)") {
  const std::size_t pool_n = 40, take = 32;
  const int rounds = 10000;
  std::vector<long> hits(pool_n, 0);
  std::mt19937_64 rng(1234);
  for (int r = 0; r < rounds; ++r) {
    auto idx = sample_without_replacement(pool_n, take, rng);
    std::set<std::size_t> distinct(idx.begin(), idx.end());
    REQUIRE(distinct.size() == take);  // without replacement
    for (std::size_t i : idx) ++hits[i];
  }
  double expected = static_cast<double>(rounds) * take / pool_n;
  double chi2 = 0.0;
  for (long h : hits) chi2 += (h - expected) * (h - expected) / expected;
  // chi-square critical value, 39 dof, alpha = 0.01
  CHECK(chi2 < 62.43);
}
