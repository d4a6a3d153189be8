#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "moviebot/core/vocab.hpp"
#include "moviebot/nlu/tags.hpp"

namespace moviebot::nlu {

// Scores of one linear-chain lattice.
//
// emissions   length x K, row-major: score of tag k at position t.
// transitions (K+1) x (K+1), row = previous tag, column = current tag.
//             Row K is the start state, column K the stop state.
//
// Tag validity comes from the TagSet (BIO well-formedness) and the intent's
// SlotConstraint:
//   kSlotFree      every position is O
//   kSlotRequired  at least one non-O tag; realized by pairing each tag with
//                  a "seen non-O" parity bit (2K states) and accepting only
//                  parity 1 at the stop state
//   kUnconstrained any well-formed sequence
struct LatticeScores {
  std::size_t length = 0;
  std::size_t num_tags = 0;
  std::span<const double> emissions;
  std::span<const double> transitions;
};

// Log of the summed exp path scores over valid sequences. -inf when no path
// is valid. Throws EmptySequenceError when length == 0.
double crf_log_partition(const LatticeScores& scores, const TagSet& tags,
                         SlotConstraint constraint);

struct ViterbiPath {
  std::vector<int> tags;
  double score = 0.0;
};

// Highest scoring valid sequence. Ties resolve toward the lower tag index at
// every backpointer and at the final state. Throws EmptySequenceError, or
// InfeasibleConstraintError when no valid path exists.
ViterbiPath crf_viterbi(const LatticeScores& scores, const TagSet& tags,
                        SlotConstraint constraint);

// Posterior statistics for gradient computation.
struct LatticeMarginals {
  double log_z = 0.0;
  std::vector<double> node;  // length x K: P(y_t = k)
  std::vector<double> edge;  // (K+1) x (K+1): expected transition counts incl. start/stop
};

LatticeMarginals crf_marginals(const LatticeScores& scores, const TagSet& tags,
                               SlotConstraint constraint);

// Score of an explicit path (no validity check).
double crf_path_score(const LatticeScores& scores, const std::vector<int>& path);

// Whether a path is well-formed and satisfies the constraint.
bool crf_path_valid(const TagSet& tags, SlotConstraint constraint,
                    const std::vector<int>& path);

double log_sum_exp(double a, double b);

}  // namespace moviebot::nlu
