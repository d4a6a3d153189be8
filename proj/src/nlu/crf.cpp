#include "moviebot/nlu/crf.hpp"

#include <cmath>
#include <limits>

#include "moviebot/util/errors.hpp"

namespace moviebot::nlu {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Shared lattice bookkeeping: state s = 2 * tag + parity.
struct Lattice {
  const LatticeScores& sc;
  const TagSet& tags;
  SlotConstraint constraint;
  std::size_t K;
  std::size_t S;

  Lattice(const LatticeScores& scores, const TagSet& t, SlotConstraint c)
      : sc(scores), tags(t), constraint(c), K(scores.num_tags), S(2 * scores.num_tags) {
    if (sc.length == 0) throw EmptySequenceError("lattice of length 0");
    if (tags.size() != K) throw DimensionError("tag set size does not match scores");
    if (sc.emissions.size() != sc.length * K ||
        sc.transitions.size() != (K + 1) * (K + 1)) {
      throw DimensionError("lattice score arrays have the wrong shape");
    }
  }

  bool tag_ok(std::size_t k) const {
    return constraint != SlotConstraint::kSlotFree || tags.is_outside(k);
  }
  std::size_t parity_after(std::size_t parity, std::size_t k) const {
    return (parity == 1 || !tags.is_outside(k)) ? 1 : 0;
  }
  bool accept(std::size_t parity) const {
    return constraint != SlotConstraint::kSlotRequired || parity == 1;
  }
  double emit(std::size_t t, std::size_t k) const { return sc.emissions[t * K + k]; }
  double trans(std::size_t from, std::size_t to) const {
    return sc.transitions[from * (K + 1) + to];
  }
};

std::vector<double> forward(const Lattice& lat) {
  const std::size_t L = lat.sc.length, K = lat.K, S = lat.S;
  std::vector<double> alpha(L * S, kNegInf);
  for (std::size_t k = 0; k < K; ++k) {
    if (!lat.tag_ok(k) || !lat.tags.allowed(K, k)) continue;
    alpha[2 * k + lat.parity_after(0, k)] = lat.trans(K, k) + lat.emit(0, k);
  }
  for (std::size_t t = 1; t < L; ++t) {
    const double* prev = &alpha[(t - 1) * S];
    double* cur = &alpha[t * S];
    for (std::size_t k = 0; k < K; ++k) {
      if (!lat.tag_ok(k)) continue;
      const double e = lat.emit(t, k);
      for (std::size_t j = 0; j < K; ++j) {
        if (!lat.tags.allowed(j, k)) continue;
        const double tr = lat.trans(j, k);
        for (std::size_t b = 0; b < 2; ++b) {
          const double a = prev[2 * j + b];
          if (a == kNegInf) continue;
          double& dst = cur[2 * k + lat.parity_after(b, k)];
          dst = log_sum_exp(dst, a + tr + e);
        }
      }
    }
  }
  return alpha;
}

std::vector<double> backward(const Lattice& lat) {
  const std::size_t L = lat.sc.length, K = lat.K, S = lat.S;
  std::vector<double> beta(L * S, kNegInf);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t b = 0; b < 2; ++b) {
      if (lat.accept(b)) beta[(L - 1) * S + 2 * k + b] = lat.trans(k, K);
    }
  }
  for (std::size_t t = L - 1; t-- > 0;) {
    const double* next = &beta[(t + 1) * S];
    double* cur = &beta[t * S];
    for (std::size_t j = 0; j < K; ++j) {
      for (std::size_t b = 0; b < 2; ++b) {
        double acc = kNegInf;
        for (std::size_t k = 0; k < K; ++k) {
          if (!lat.tag_ok(k) || !lat.tags.allowed(j, k)) continue;
          const double nb = next[2 * k + lat.parity_after(b, k)];
          if (nb == kNegInf) continue;
          acc = log_sum_exp(acc, lat.trans(j, k) + lat.emit(t + 1, k) + nb);
        }
        cur[2 * j + b] = acc;
      }
    }
  }
  return beta;
}

double finish(const Lattice& lat, const std::vector<double>& alpha) {
  const std::size_t L = lat.sc.length, K = lat.K, S = lat.S;
  double z = kNegInf;
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t b = 0; b < 2; ++b) {
      const double a = alpha[(L - 1) * S + 2 * k + b];
      if (a == kNegInf || !lat.accept(b)) continue;
      z = log_sum_exp(z, a + lat.trans(k, K));
    }
  }
  return z;
}

}  // namespace

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

double crf_log_partition(const LatticeScores& scores, const TagSet& tags,
                         SlotConstraint constraint) {
  Lattice lat(scores, tags, constraint);
  return finish(lat, forward(lat));
}

ViterbiPath crf_viterbi(const LatticeScores& scores, const TagSet& tags,
                        SlotConstraint constraint) {
  Lattice lat(scores, tags, constraint);
  const std::size_t L = scores.length, K = lat.K, S = lat.S;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<double> delta(L * S, kNegInf);
  std::vector<std::size_t> back(L * S, kNone);
  for (std::size_t k = 0; k < K; ++k) {
    if (!lat.tag_ok(k) || !tags.allowed(K, k)) continue;
    delta[2 * k + lat.parity_after(0, k)] = lat.trans(K, k) + lat.emit(0, k);
  }
  for (std::size_t t = 1; t < L; ++t) {
    for (std::size_t k = 0; k < K; ++k) {
      if (!lat.tag_ok(k)) continue;
      const double e = lat.emit(t, k);
      // Predecessors are visited in ascending state order with a strict
      // comparison, so ties keep the lowest (tag, parity).
      for (std::size_t j = 0; j < K; ++j) {
        if (!tags.allowed(j, k)) continue;
        for (std::size_t b = 0; b < 2; ++b) {
          const double d = delta[(t - 1) * S + 2 * j + b];
          if (d == kNegInf) continue;
          const std::size_t s = 2 * k + lat.parity_after(b, k);
          const double cand = d + lat.trans(j, k) + e;
          if (cand > delta[t * S + s]) {
            delta[t * S + s] = cand;
            back[t * S + s] = 2 * j + b;
          }
        }
      }
    }
  }
  double best = kNegInf;
  std::size_t best_state = kNone;
  for (std::size_t s = 0; s < S; ++s) {
    const double d = delta[(L - 1) * S + s];
    if (d == kNegInf || !lat.accept(s % 2)) continue;
    const double cand = d + lat.trans(s / 2, K);
    if (cand > best) {
      best = cand;
      best_state = s;
    }
  }
  if (best_state == kNone) {
    throw InfeasibleConstraintError("no tag sequence satisfies the intent constraint");
  }
  ViterbiPath path;
  path.score = best;
  path.tags.resize(L);
  std::size_t s = best_state;
  for (std::size_t t = L; t-- > 0;) {
    path.tags[t] = static_cast<int>(s / 2);
    s = back[t * S + s];
  }
  return path;
}

LatticeMarginals crf_marginals(const LatticeScores& scores, const TagSet& tags,
                               SlotConstraint constraint) {
  Lattice lat(scores, tags, constraint);
  const std::size_t L = scores.length, K = lat.K, S = lat.S;
  LatticeMarginals m;
  m.node.assign(L * K, 0.0);
  m.edge.assign((K + 1) * (K + 1), 0.0);
  const auto alpha = forward(lat);
  m.log_z = finish(lat, alpha);
  if (m.log_z == kNegInf) return m;
  const auto beta = backward(lat);
  const double z = m.log_z;

  for (std::size_t t = 0; t < L; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      const double a = alpha[t * S + s], b = beta[t * S + s];
      if (a == kNegInf || b == kNegInf) continue;
      const double p = std::exp(a + b - z);
      m.node[t * K + s / 2] += p;
      if (t == 0) m.edge[K * (K + 1) + s / 2] += p;
    }
  }
  for (std::size_t s = 0; s < S; ++s) {
    const double a = alpha[(L - 1) * S + s];
    if (a == kNegInf || !lat.accept(s % 2)) continue;
    m.edge[(s / 2) * (K + 1) + K] += std::exp(a + lat.trans(s / 2, K) - z);
  }
  for (std::size_t t = 1; t < L; ++t) {
    for (std::size_t j = 0; j < K; ++j) {
      for (std::size_t b = 0; b < 2; ++b) {
        const double a = alpha[(t - 1) * S + 2 * j + b];
        if (a == kNegInf) continue;
        for (std::size_t k = 0; k < K; ++k) {
          if (!lat.tag_ok(k) || !tags.allowed(j, k)) continue;
          const double bt = beta[t * S + 2 * k + lat.parity_after(b, k)];
          if (bt == kNegInf) continue;
          m.edge[j * (K + 1) + k] += std::exp(a + lat.trans(j, k) + lat.emit(t, k) + bt - z);
        }
      }
    }
  }
  return m;
}

double crf_path_score(const LatticeScores& scores, const std::vector<int>& path) {
  const std::size_t K = scores.num_tags;
  if (path.size() != scores.length) throw DimensionError("path length mismatch");
  if (path.empty()) throw EmptySequenceError("empty path");
  double s = 0.0;
  std::size_t prev = K;
  for (std::size_t t = 0; t < path.size(); ++t) {
    const auto k = static_cast<std::size_t>(path[t]);
    s += scores.transitions[prev * (K + 1) + k] + scores.emissions[t * K + k];
    prev = k;
  }
  return s + scores.transitions[prev * (K + 1) + K];
}

bool crf_path_valid(const TagSet& tags, SlotConstraint constraint,
                    const std::vector<int>& path) {
  if (!tags.well_formed(path)) return false;
  bool any_slot = false;
  for (int t : path) {
    if (!tags.is_outside(static_cast<std::size_t>(t))) any_slot = true;
  }
  switch (constraint) {
    case SlotConstraint::kSlotFree:
      return !any_slot;
    case SlotConstraint::kSlotRequired:
      return any_slot;
    case SlotConstraint::kUnconstrained:
      return true;
  }
  return false;
}

}  // namespace moviebot::nlu
