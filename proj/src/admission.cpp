#include "nfvsim/admission.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace nfvsim {

void WaitMatrix::record_deployment(int position, double duration) {
  if (position != static_cast<int>(durations_.size())) {
    throw std::logic_error("out-of-order deployment record: position " +
                           std::to_string(position) + ", expected " +
                           std::to_string(durations_.size()));
  }
  if (duration < 0) throw std::invalid_argument("negative deployment duration");
  durations_.push_back(duration);
  prefix_.push_back(prefix_.back() + duration);
}

double WaitMatrix::total_wait(int position) const {
  if (position < 0) throw std::out_of_range("negative queue position");
  // The front never waits; later positions wait for everything recorded
  // ahead of them.
  int k = std::min(position, static_cast<int>(durations_.size()));
  return prefix_[k];
}

std::vector<std::vector<double>> WaitMatrix::materialize(int size) const {
  std::vector<std::vector<double>> m(size, std::vector<double>(size, 0.0));
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      int k = std::min({i + 1, j, static_cast<int>(durations_.size())});
      m[i][j] = prefix_[k];
    }
  }
  return m;
}

}  // namespace nfvsim
