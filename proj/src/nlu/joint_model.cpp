#include "moviebot/nlu/joint_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "moviebot/nlu/lexicon.hpp"
#include "moviebot/util/binary_io.hpp"
#include "moviebot/util/errors.hpp"
#include "moviebot/util/hash.hpp"
#include "moviebot/util/rng.hpp"

namespace moviebot::nlu {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint32_t kFormatVersion = 1;

}  // namespace

CrfModel::CrfModel(TagSet tags, std::vector<SlotConstraint> constraints, std::size_t hash_dim)
    : tags_(std::move(tags)), constraints_(std::move(constraints)), hash_dim_(hash_dim) {
  if (constraints_.empty()) throw DimensionError("model needs at least one intent");
  if (hash_dim_ == 0) throw DimensionError("hash dimension must be positive");
  const std::size_t K = tags_.size();
  params_.assign(compat_offset() + constraints_.size() * K, 0.0);
}

CrfModel CrfModel::standard(std::size_t hash_dim) {
  std::vector<SlotConstraint> cons;
  for (auto i : kAllUserIntents) cons.push_back(slot_constraint(i));
  return CrfModel(TagSet::standard(), std::move(cons), hash_dim);
}

bool CrfModel::operator==(const CrfModel& other) const {
  if (num_tags() != other.num_tags() || hash_dim_ != other.hash_dim_ ||
      constraints_ != other.constraints_ || params_ != other.params_) {
    return false;
  }
  for (std::size_t k = 0; k < num_tags(); ++k) {
    if (tags_.name(k) != other.tags_.name(k)) return false;
  }
  return true;
}

void CrfModel::save(const std::string& path) const {
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write model: " + path);
    binio::write_magic(out, "CRF1");
    binio::write_pod<std::uint32_t>(out, kFormatVersion);
    binio::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(num_intents()));
    binio::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(num_tags()));
    binio::write_pod<std::uint64_t>(out, hash_dim_);
    for (auto c : constraints_) binio::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(c));
    for (std::size_t k = 0; k < num_tags(); ++k) {
      binio::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(tags_[k].kind));
      binio::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(tags_[k].slot));
    }
    binio::write_pod<std::uint64_t>(out, params_.size());
    binio::write_doubles(out, params_);
    if (!out) throw StorageError("failed writing model: " + path);
  }
  nlohmann::json side;
  side["format"] = "CRF1";
  side["version"] = kFormatVersion;
  side["hash"] = {{"function", "fnv1a64+splitmix64"}, {"seed", kFeatureHashSeed},
                  {"dim", hash_dim_}};
  side["feature_templates"] = kFeatureTemplateVersion;
  auto& intents = side["intents"] = nlohmann::json::array();
  for (std::size_t i = 0; i < num_intents(); ++i) {
    std::string cname = constraints_[i] == SlotConstraint::kSlotFree       ? "slot-free"
                        : constraints_[i] == SlotConstraint::kSlotRequired ? "slot-required"
                                                                           : "unconstrained";
    std::string iname = num_intents() == kNumUserIntents
                            ? std::string(name(kAllUserIntents[i]))
                            : "intent" + std::to_string(i);
    intents.push_back({{"name", iname}, {"constraint", cname}});
  }
  auto& tags = side["tags"] = nlohmann::json::array();
  for (std::size_t k = 0; k < num_tags(); ++k) tags.push_back(tags_.name(k));
  std::ofstream js(path + ".json", std::ios::trunc);
  js << side.dump(2) << "\n";
}

CrfModel CrfModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot open model: " + path);
  binio::expect_magic(in, "CRF1");
  if (binio::read_pod<std::uint32_t>(in) != kFormatVersion) {
    throw ParseError("unsupported CRF1 version in " + path);
  }
  const auto I = binio::read_pod<std::uint32_t>(in);
  const auto K = binio::read_pod<std::uint32_t>(in);
  const auto D = binio::read_pod<std::uint64_t>(in);
  if (I == 0 || K == 0 || K > 64 || D == 0 || D > (std::uint64_t{1} << 31)) {
    throw ParseError("implausible CRF1 dimensions in " + path);
  }
  std::vector<SlotConstraint> cons;
  for (std::uint32_t i = 0; i < I; ++i) {
    const auto c = binio::read_pod<std::uint8_t>(in);
    if (c > 2) throw ParseError("bad constraint code in " + path);
    cons.push_back(static_cast<SlotConstraint>(c));
  }
  std::vector<TagSet::Tag> tags;
  for (std::uint32_t k = 0; k < K; ++k) {
    const auto kind = binio::read_pod<std::uint8_t>(in);
    const auto slot = binio::read_pod<std::uint8_t>(in);
    if (kind > 2 || slot >= kNumSlots) throw ParseError("bad tag code in " + path);
    tags.push_back({static_cast<TagSet::Kind>(kind), static_cast<Slot>(slot)});
  }
  CrfModel model(TagSet(std::move(tags)), std::move(cons), D);
  if (binio::read_pod<std::uint64_t>(in) != model.params_.size()) {
    throw ParseError("parameter count mismatch in " + path);
  }
  binio::read_doubles(in, model.params_);

  std::ifstream js(path + ".json");
  if (js) {
    nlohmann::json side;
    try {
      js >> side;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("bad model sidecar " + path + ".json: " + e.what());
    }
    if (side.value("feature_templates", 0) != kFeatureTemplateVersion) {
      throw ConfigError("model was trained with a different feature template version");
    }
    if (side.contains("hash") && side["hash"].value("seed", kFeatureHashSeed) != kFeatureHashSeed) {
      throw ConfigError("model was trained with a different feature hash seed");
    }
  }
  return model;
}

double intent_score(const CrfModel& model, const EncodedUtterance& input, std::size_t intent) {
  const auto& w = model.params();
  double s = 0.0;
  for (auto f : input.utterance_features) s += w[model.intent_index(intent, f)];
  return s;
}

namespace {

// Emission scores shared by every intent (compat terms excluded), with the
// year mask applied.
std::vector<double> base_emissions(const CrfModel& model, const EncodedUtterance& input) {
  const std::size_t L = input.token_features.size(), K = model.num_tags();
  if (input.tokens.size() != L) throw DimensionError("token and feature counts differ");
  const auto& w = model.params();
  const auto& tags = model.tags();
  std::vector<double> e(L * K, 0.0);
  for (std::size_t t = 0; t < L; ++t) {
    const bool year_ok = is_year_token(input.tokens[t]);
    for (std::size_t k = 0; k < K; ++k) {
      if (!tags.is_outside(k) && tags[k].slot == Slot::kYear &&
          (tags[k].kind == TagSet::Kind::kInside || !year_ok)) {
        e[t * K + k] = kNegInf;
        continue;
      }
      double s = 0.0;
      for (auto f : input.token_features[t]) s += w[model.emission_index(k, f)];
      e[t * K + k] = s;
    }
  }
  return e;
}

IntentLattice lattice_from_base(const CrfModel& model, const std::vector<double>& base,
                                std::size_t length, std::size_t intent) {
  const std::size_t K = model.num_tags();
  IntentLattice lat;
  lat.length = length;
  lat.num_tags = K;
  lat.emissions = base;
  const auto& w = model.params();
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t k = 0; k < K; ++k) lat.emissions[t * K + k] += w[model.compat_index(intent, k)];
  }
  const auto first = w.begin() + static_cast<std::ptrdiff_t>(model.transition_offset());
  lat.transitions.assign(first, first + static_cast<std::ptrdiff_t>((K + 1) * (K + 1)));
  return lat;
}

void check_intent(const CrfModel& model, std::size_t intent) {
  if (intent >= model.num_intents()) throw DimensionError("intent index out of range");
}

}  // namespace

IntentLattice build_lattice(const CrfModel& model, const EncodedUtterance& input,
                            std::size_t intent) {
  check_intent(model, intent);
  return lattice_from_base(model, base_emissions(model, input), input.tokens.size(), intent);
}

double crf_forward_logZ(const CrfModel& model, const EncodedUtterance& input,
                        std::size_t intent) {
  const auto lat = build_lattice(model, input, intent);
  return crf_log_partition(lat.view(), model.tags(), model.constraint(intent));
}

ViterbiPath crf_viterbi(const CrfModel& model, const EncodedUtterance& input,
                        std::size_t intent) {
  const auto lat = build_lattice(model, input, intent);
  return crf_viterbi(lat.view(), model.tags(), model.constraint(intent));
}

double joint_log_partition(const CrfModel& model, const EncodedUtterance& input) {
  const auto base = base_emissions(model, input);
  double z = kNegInf;
  for (std::size_t i = 0; i < model.num_intents(); ++i) {
    const auto lat = lattice_from_base(model, base, input.tokens.size(), i);
    const double zi = crf_log_partition(lat.view(), model.tags(), model.constraint(i));
    if (zi == kNegInf) continue;
    z = log_sum_exp(z, intent_score(model, input, i) + zi);
  }
  return z;
}

JointPrediction joint_predict(const CrfModel& model, const EncodedUtterance& input) {
  JointPrediction best;
  if (input.tokens.empty()) {
    for (std::size_t i = model.num_intents(); i-- > 0;) {
      if (model.constraint(i) == SlotConstraint::kUnconstrained) {
        best.intent = i;
        best.intent_score = intent_score(model, input, i);
        return best;
      }
    }
    throw InfeasibleConstraintError("no intent accepts an empty utterance");
  }
  const auto base = base_emissions(model, input);
  double best_total = kNegInf;
  bool found = false;
  for (std::size_t i = 0; i < model.num_intents(); ++i) {
    const auto lat = lattice_from_base(model, base, input.tokens.size(), i);
    ViterbiPath path;
    try {
      path = crf_viterbi(lat.view(), model.tags(), model.constraint(i));
    } catch (const InfeasibleConstraintError&) {
      continue;
    }
    const double a = intent_score(model, input, i);
    if (!found || a + path.score > best_total) {
      found = true;
      best_total = a + path.score;
      best.intent = i;
      best.tags = std::move(path.tags);
      best.intent_score = a;
      best.sequence_score = path.score;
    }
  }
  if (!found) throw InfeasibleConstraintError("no intent admits a valid tag sequence");
  return best;
}

LoglikGrad crf_loglik_and_grad(const CrfModel& model, const EncodedUtterance& input,
                               std::size_t gold_intent, const std::vector<int>& gold_tags) {
  check_intent(model, gold_intent);
  const std::size_t L = input.tokens.size(), K = model.num_tags(), I = model.num_intents();
  if (L == 0) throw EmptySequenceError("cannot score an empty utterance");
  if (gold_tags.size() != L) throw InvalidGoldError("gold tag count differs from token count");
  for (int y : gold_tags) {
    if (y < 0 || static_cast<std::size_t>(y) >= K) throw InvalidGoldError("gold tag out of range");
  }
  if (!crf_path_valid(model.tags(), model.constraint(gold_intent), gold_tags)) {
    throw InvalidGoldError("gold tags violate the constraint of the gold intent");
  }

  const auto base = base_emissions(model, input);
  std::vector<double> a(I), logz(I);
  std::vector<LatticeMarginals> marg(I);
  double z = kNegInf;
  double gold_path = 0.0;
  for (std::size_t i = 0; i < I; ++i) {
    const auto lat = lattice_from_base(model, base, L, i);
    a[i] = intent_score(model, input, i);
    marg[i] = crf_marginals(lat.view(), model.tags(), model.constraint(i));
    logz[i] = marg[i].log_z;
    if (logz[i] != kNegInf) z = log_sum_exp(z, a[i] + logz[i]);
    if (i == gold_intent) gold_path = crf_path_score(lat.view(), gold_tags);
  }
  if (!std::isfinite(gold_path)) throw InvalidGoldError("gold path has zero probability");

  LoglikGrad out;
  out.loglik = a[gold_intent] + gold_path - z;

  std::vector<double> p(I, 0.0);
  for (std::size_t i = 0; i < I; ++i) {
    if (logz[i] != kNegInf) p[i] = std::exp(a[i] + logz[i] - z);
  }

  auto& g = out.gradient;
  g.reserve(I * input.utterance_features.size() + L * K * 24 + (K + 1) * (K + 1) + I * K);
  for (std::size_t i = 0; i < I; ++i) {
    const double c = (i == gold_intent ? 1.0 : 0.0) - p[i];
    for (auto f : input.utterance_features) g.emplace_back(model.intent_index(i, f), c);
  }

  // Expected tag occupancy mixed over intents.
  std::vector<double> occ(L * K, 0.0);
  for (std::size_t i = 0; i < I; ++i) {
    if (p[i] == 0.0) continue;
    for (std::size_t j = 0; j < L * K; ++j) occ[j] += p[i] * marg[i].node[j];
  }
  for (std::size_t t = 0; t < L; ++t) {
    for (std::size_t k = 0; k < K; ++k) {
      const double c = (gold_tags[t] == static_cast<int>(k) ? 1.0 : 0.0) - occ[t * K + k];
      if (c == 0.0) continue;
      for (auto f : input.token_features[t]) g.emplace_back(model.emission_index(k, f), c);
    }
  }

  std::vector<double> trans((K + 1) * (K + 1), 0.0);
  std::size_t prev = K;
  for (int y : gold_tags) {
    trans[prev * (K + 1) + static_cast<std::size_t>(y)] += 1.0;
    prev = static_cast<std::size_t>(y);
  }
  trans[prev * (K + 1) + K] += 1.0;
  for (std::size_t i = 0; i < I; ++i) {
    if (p[i] == 0.0) continue;
    for (std::size_t j = 0; j < trans.size(); ++j) trans[j] -= p[i] * marg[i].edge[j];
  }
  for (std::size_t j = 0; j < trans.size(); ++j) {
    g.emplace_back(model.transition_offset() + j, trans[j]);
  }

  for (std::size_t i = 0; i < I; ++i) {
    for (std::size_t k = 0; k < K; ++k) {
      double c = 0.0;
      if (i == gold_intent) {
        for (int y : gold_tags) c += y == static_cast<int>(k) ? 1.0 : 0.0;
      }
      if (p[i] != 0.0) {
        double expected = 0.0;
        for (std::size_t t = 0; t < L; ++t) expected += marg[i].node[t * K + k];
        c -= p[i] * expected;
      }
      g.emplace_back(model.compat_index(i, k), c);
    }
  }
  return out;
}

std::vector<std::size_t> touched_indices(const CrfModel& model, const EncodedUtterance& input) {
  std::vector<std::size_t> idx;
  const std::size_t I = model.num_intents(), K = model.num_tags();
  for (std::size_t i = 0; i < I; ++i) {
    for (auto f : input.utterance_features) idx.push_back(model.intent_index(i, f));
  }
  for (const auto& feats : input.token_features) {
    for (std::size_t k = 0; k < K; ++k) {
      for (auto f : feats) idx.push_back(model.emission_index(k, f));
    }
  }
  for (std::size_t j = 0; j < (K + 1) * (K + 1); ++j) idx.push_back(model.transition_offset() + j);
  for (std::size_t j = 0; j < I * K; ++j) idx.push_back(model.compat_offset() + j);
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

namespace {

// Lazy bookkeeping for averaged SGD with multiplicative L2 decay.
//
// With decay d_s applied at step s, let P(t) = prod_{s<=t} d_s and
// Q(t) = sum_{s<=t} P(s). A weight last touched at step tau and untouched
// through step t has w_t = w_tau * P(t) / P(tau), and its running sum of
// iterates grows by w_tau * (Q(t) - Q(tau)) / P(tau).
class LazyAsgd {
 public:
  explicit LazyAsgd(std::vector<double>& w) : w_(w), sum_(w.size(), 0.0), last_(w.size(), 0) {
    cum_p_.push_back(1.0);
    cum_q_.push_back(0.0);
  }

  std::uint32_t step() const { return static_cast<std::uint32_t>(cum_p_.size() - 1); }

  void catch_up(std::size_t p) {
    const std::uint32_t t = step(), tau = last_[p];
    if (tau == t) return;
    const double base = w_[p] / cum_p_[tau];
    sum_[p] += base * (cum_q_[t] - cum_q_[tau]);
    w_[p] = base * cum_p_[t];
    last_[p] = t;
  }

  // Advances to the next step with decay d. Touched weights must have been
  // caught up; they are decayed, updated, and accumulated here.
  void apply(double decay, const std::vector<std::size_t>& touched, const SparseGradient& grad,
             double eta) {
    cum_p_.push_back(cum_p_.back() * decay);
    cum_q_.push_back(cum_q_.back() + cum_p_.back());
    const std::uint32_t t = step();
    for (auto p : touched) w_[p] *= decay;
    for (const auto& [p, gv] : grad) w_[p] += eta * gv;
    for (auto p : touched) {
      sum_[p] += w_[p];
      last_[p] = t;
    }
  }

  void averaged(std::vector<double>& out) {
    const double t = static_cast<double>(step());
    out.resize(w_.size());
    for (std::size_t p = 0; p < w_.size(); ++p) {
      catch_up(p);
      out[p] = t > 0 ? sum_[p] / t : w_[p];
    }
  }

 private:
  std::vector<double>& w_;
  std::vector<double> sum_;
  std::vector<std::uint32_t> last_;
  std::vector<double> cum_p_;
  std::vector<double> cum_q_;
};

double mean_objective(const CrfModel& model, const std::vector<TrainingInstance>& data,
                      double l2) {
  double ll = 0.0;
  for (const auto& ex : data) {
    const double z = joint_log_partition(model, ex.input);
    const auto lat = build_lattice(model, ex.input, ex.intent);
    ll += intent_score(model, ex.input, ex.intent) + crf_path_score(lat.view(), ex.tags) - z;
  }
  double sq = 0.0;
  for (double v : model.params()) sq += v * v;
  return (ll - 0.5 * l2 * sq) / static_cast<double>(data.size());
}

}  // namespace

CrfTrainResult crf_train(CrfModel init, const std::vector<TrainingInstance>& data,
                         const CrfTrainConfig& config) {
  if (data.empty()) throw EmptyCorpusError("cannot train on an empty corpus");
  if (config.epochs < 1 || !(config.learning_rate > 0) || config.l2 < 0) {
    throw ConfigError("crf_train: epochs >= 1, learning_rate > 0 and l2 >= 0 required");
  }
  const double n = static_cast<double>(data.size());
  if (config.learning_rate * config.l2 / n >= 1.0) {
    throw ConfigError("crf_train: l2 too strong for the learning rate");
  }
  for (const auto& ex : data) {
    if (!crf_path_valid(init.tags(), init.constraint(ex.intent), ex.tags) ||
        ex.tags.size() != ex.input.tokens.size()) {
      throw InvalidGoldError("training instance violates its intent constraint");
    }
  }

  CrfModel model = std::move(init);
  CrfModel averaged = model;
  LazyAsgd asgd(model.params());
  Rng rng(config.seed);
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  CrfTrainResult result{averaged, {}};
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const double eta = config.learning_rate / epoch;
    const double decay = 1.0 - eta * config.l2 / n;
    rng.shuffle(order);
    for (auto idx : order) {
      const auto& ex = data[idx];
      const auto touched = touched_indices(model, ex.input);
      for (auto p : touched) asgd.catch_up(p);
      const auto lg = crf_loglik_and_grad(model, ex.input, ex.intent, ex.tags);
      asgd.apply(decay, touched, lg.gradient, eta);
    }
    asgd.averaged(averaged.params());
    result.epoch_objective.push_back(mean_objective(averaged, data, config.l2));
  }
  result.model = std::move(averaged);
  return result;
}

}  // namespace moviebot::nlu
