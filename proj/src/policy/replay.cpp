#include "moviebot/policy/replay.hpp"

#include "moviebot/util/errors.hpp"

namespace moviebot::policy {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("replay capacity must be positive");
  items_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  if (items_.empty()) throw EmptyListError("cannot sample from an empty replay buffer");
  std::vector<std::size_t> out(n);
  for (auto& i : out) i = rng.index(items_.size());
  return out;
}

}  // namespace moviebot::policy
