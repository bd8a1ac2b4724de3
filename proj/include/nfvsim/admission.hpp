#pragma once

#include <vector>

namespace nfvsim {

// Records per-service deployment durations in queue order and answers
// cumulative waits. Entry [i][j] of the materialized matrix is the wait
// accumulated by service j after service i has been processed; the
// diagonal is each service's total wait.
class WaitMatrix {
 public:
  // Positions must be recorded in queue order, starting at 0.
  void record_deployment(int position, double duration);

  // Total wait of the service at `position`: the sum of the durations of
  // the services processed ahead of it.
  double total_wait(int position) const;

  std::vector<std::vector<double>> materialize(int size) const;

  const std::vector<double>& durations() const { return durations_; }

 private:
  std::vector<double> durations_;
  std::vector<double> prefix_{0.0};  // prefix_[k] = sum of first k durations
};

// Eq-style admission gate: deploy when the accumulated wait has not
// exceeded the threshold waiting time (boundary inclusive).
inline int admit(double total_wait, double threshold_wait) {
  return total_wait <= threshold_wait ? 1 : 0;
}

}  // namespace nfvsim
