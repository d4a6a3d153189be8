#pragma once

#include <cstddef>
#include <vector>

#include "moviebot/util/rng.hpp"

namespace moviebot::policy {

struct Transition {
  std::vector<double> obs;
  std::size_t action = 0;
  double reward = 0.0;
  std::vector<double> next_obs;
  bool terminal = false;  // no bootstrap from next_obs
};

// Fixed-capacity ring; the oldest transition is overwritten when full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return items_[i]; }

  // n indices drawn uniformly with replacement. EmptyListError when empty.
  std::vector<std::size_t> sample(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

}  // namespace moviebot::policy
