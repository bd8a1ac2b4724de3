#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace nfvsim {

enum class RidgeState { Observe, Train, Predict };

// Priority value plus its tens (macro class) and hundredths (micro class)
// decomposition.
struct PriorityLabel {
  double value = 0.0;
  int macro_class = 0;
  int micro_class = 0;
};

PriorityLabel make_priority_label(double value);

struct RidgeConfig {
  double lambda = 0.1;
  int observation_threshold = 32;
  int batch_size = 32;
  double accuracy_target = 0.80;
  int check_period = 16;   // accuracy check every N ingested transitions
  int holdout_stride = 5;  // every Nth stored transition is held out
};

// Closed-form ridge on centered data; the intercept is not penalized.
// Throws when the system is singular (collinear data with lambda = 0).
struct RidgeFit {
  std::vector<double> weights;
  double intercept = 0.0;
};
RidgeFit ridge_fit(const std::vector<std::vector<double>>& features,
                   const std::vector<double>& targets, double lambda);

// Uniform sample of `take` distinct indices from [0, pool). Used for the
// memory batches so no transition is favoured.
std::vector<std::size_t> sample_without_replacement(std::size_t pool, std::size_t take,
                                                    std::mt19937_64& rng);

// Online ridge regressor with an Observe -> Train -> Predict lifecycle.
// Features are min-max normalized with running ranges from the buffer.
class RidgeModel {
 public:
  RidgeModel(RidgeConfig cfg, std::uint64_t seed);

  // Observe: stores the transition and returns a uniform random priority.
  // Train: stores, fits on a random batch plus the current transition and
  // returns the clamped prediction. Predict: prediction only.
  double ingest(const std::vector<double>& features, double observed_y);

  // Requires Train or Predict state.
  PriorityLabel predict(const std::vector<double>& features) const;

  // Fraction of samples whose relative error |y' - y| / max(y, 0.1) <= 0.10.
  double accuracy(const std::vector<std::pair<std::vector<double>, double>>& eval_set) const;

  RidgeState state() const { return state_; }
  std::size_t buffer_size() const { return buffer_.size(); }
  double last_accuracy() const { return last_accuracy_; }
  const std::vector<double>& weights() const { return weights_; }
  double intercept() const { return intercept_; }

  void save(const std::string& path) const;
  static RidgeModel load(const std::string& path, std::uint64_t seed = 0);

 private:
  std::vector<double> normalize(const std::vector<double>& raw) const;
  void fit_on_batch(const std::vector<double>& current_a, double current_y);
  void check_accuracy();

  RidgeConfig cfg_;
  RidgeState state_ = RidgeState::Observe;
  std::vector<std::pair<std::vector<double>, double>> buffer_;
  std::vector<double> feat_min_, feat_max_;
  std::vector<double> weights_;
  double intercept_ = 0.0;
  bool fitted_ = false;
  double last_accuracy_ = 0.0;
  long ingested_ = 0;
  std::mt19937_64 rng_;
};

}  // namespace nfvsim
