#include "moviebot/policy/rl.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "moviebot/policy/replay.hpp"
#include "moviebot/util/errors.hpp"

namespace moviebot::policy {

void TrainConfig::validate() const {
  auto rate = [](double v, const char* what) {
    if (!(v > 0.0 && v <= 1.0)) throw ConfigError(fmt::format("{} must lie in (0, 1], got {}", what, v));
  };
  rate(gamma, "gamma");
  rate(learning_rate, "learning_rate");
  rate(epsilon_start, "epsilon_start");
  rate(epsilon_end, "epsilon_end");
  rate(epsilon_decay_fraction, "epsilon_decay_fraction");
  rate(reward_scale, "reward_scale");
  if (epsilon_end > epsilon_start) throw ConfigError("epsilon_end exceeds epsilon_start");
  if (entropy_coef < 0.0 || value_coef <= 0.0) throw ConfigError("A2C loss weights out of range");
  if (episodes == 0) throw ConfigError("episodes must be at least 1");
  if (batch_size == 0 || target_sync == 0 || n_step == 0 || replay_capacity == 0) {
    throw ConfigError("batch_size, target_sync, n_step and replay_capacity must be positive");
  }
  if (batch_size > replay_capacity) throw ConfigError("batch_size exceeds replay_capacity");
  if (grad_clip < 0.0) throw ConfigError("grad_clip must be non-negative");
  for (auto h : hidden) {
    if (h == 0) throw ConfigError("hidden layer sizes must be positive");
  }
}

double epsilon_at(std::size_t unit, std::size_t total_units, const TrainConfig& cfg) {
  const double horizon = cfg.epsilon_decay_fraction * static_cast<double>(total_units);
  const double u = static_cast<double>(unit);
  if (horizon <= 0.0 || u >= horizon) return cfg.epsilon_end;
  return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * (u / horizon);
}

void write_curve_csv(const std::string& path, const std::vector<CurveRow>& curve) {
  std::ofstream out(path);
  if (!out) throw StorageError("cannot write training curve to " + path);
  out << "episode,reward,success_flag,turns,epsilon\n";
  for (const auto& r : curve) {
    out << fmt::format("{},{},{},{},{:.6f}\n", r.episode, r.reward, r.success ? 1 : 0, r.turns,
                       r.epsilon);
  }
  if (!out) throw StorageError("failed writing " + path);
}

std::vector<double> stable_softmax(std::span<const double> logits) {
  std::vector<double> p(logits.size());
  double hi = -30.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!std::isfinite(logits[i])) throw NumericalError("non-finite policy logit");
    p[i] = std::clamp(logits[i], -30.0, 30.0);
    hi = std::max(hi, p[i]);
  }
  double z = 0.0;
  for (auto& v : p) z += (v = std::exp(v - hi));
  for (auto& v : p) v /= z;
  return p;
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

namespace {

std::vector<std::size_t> layer_sizes(std::size_t in, const std::vector<std::size_t>& hidden,
                                     std::size_t out) {
  std::vector<std::size_t> s{in};
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(out);
  return s;
}

// Plain SGD or Adam over a flat parameter vector, with global-norm clipping.
class Optimizer {
 public:
  Optimizer(std::size_t n, const TrainConfig& cfg) : cfg_(cfg) {
    if (cfg.adam) {
      m_.assign(n, 0.0);
      v_.assign(n, 0.0);
    }
  }

  void apply(std::vector<double>& params, std::vector<double>& grad) {
    for (double g : grad) {
      if (!std::isfinite(g)) throw NumericalError("non-finite gradient during training");
    }
    if (cfg_.grad_clip > 0.0) {
      double norm = 0.0;
      for (double g : grad) norm += g * g;
      norm = std::sqrt(norm);
      if (norm > cfg_.grad_clip) {
        const double s = cfg_.grad_clip / norm;
        for (double& g : grad) g *= s;
      }
    }
    const double lr = cfg_.learning_rate;
    if (!cfg_.adam) {
      for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
      return;
    }
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++t_;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = b1 * m_[i] + (1 - b1) * grad[i];
      v_[i] = b2 * v_[i] + (1 - b2) * grad[i] * grad[i];
      params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps);
    }
  }

 private:
  const TrainConfig& cfg_;
  std::vector<double> m_, v_;
  std::size_t t_ = 0;
};

void check_env(const Environment& env) {
  if (env.observation_size() == 0 || env.num_actions() == 0) {
    throw ConfigError("environment reports an empty observation or action space");
  }
}

// Streams: 0 network init, 1 acting, 2 replay sampling.
constexpr std::uint64_t kInitStream = 0, kActStream = 1, kReplayStream = 2;

std::size_t sample_categorical(const std::vector<double>& p, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return p.size() - 1;
}

}  // namespace

TrainResult dqn_train(Environment& env, const TrainConfig& cfg, const SyncObserver& on_sync) {
  cfg.validate();
  check_env(env);
  const std::size_t A = env.num_actions();
  Rng init_rng(mix_seed(cfg.seed, kInitStream));
  Rng act_rng(mix_seed(cfg.seed, kActStream));
  Rng replay_rng(mix_seed(cfg.seed, kReplayStream));

  TrainResult res{Mlp::he_uniform(layer_sizes(env.observation_size(), cfg.hidden, A), init_rng),
                  {}, 0, 0};
  Mlp& online = res.net;
  Mlp target = online;
  ReplayBuffer buffer(cfg.replay_capacity);
  Optimizer opt(online.num_params(), cfg);
  std::vector<double> grad(online.num_params());
  const bool by_steps = cfg.max_steps > 0;
  const std::size_t budget = by_steps ? cfg.max_steps : cfg.episodes;

  for (std::size_t ep = 0; by_steps ? res.env_steps < cfg.max_steps : ep < cfg.episodes; ++ep) {
    auto obs = env.reset(mix_seed(cfg.seed, 1000 + ep));
    if (obs.size() != online.input_size()) throw ConfigError("observation size changed after reset");
    CurveRow row;
    row.episode = ep;
    row.epsilon = epsilon_at(by_steps ? res.env_steps : ep, budget, cfg);
    while (true) {
      const double eps = epsilon_at(by_steps ? res.env_steps : ep, budget, cfg);
      const std::size_t a =
          act_rng.bernoulli(eps) ? act_rng.index(A) : argmax(online.forward(obs));
      auto step = env.step(a);
      ++res.env_steps;
      ++row.turns;
      row.reward += step.reward;
      const bool terminal = step.done && !step.truncated;
      buffer.push({obs, a, step.reward * cfg.reward_scale, step.observation, terminal});
      obs = std::move(step.observation);

      if (buffer.size() >= cfg.batch_size) {
        std::fill(grad.begin(), grad.end(), 0.0);
        const double inv_b = 1.0 / static_cast<double>(cfg.batch_size);
        std::vector<double> out_grad(A);
        for (auto idx : buffer.sample(cfg.batch_size, replay_rng)) {
          const auto& t = buffer[idx];
          double y = t.reward;
          if (!t.terminal) {
            const auto qn = target.forward(t.next_obs);
            y += cfg.gamma * *std::max_element(qn.begin(), qn.end());
          }
          const auto tape = online.forward_tape(t.obs);
          std::fill(out_grad.begin(), out_grad.end(), 0.0);
          // d/dq of (q - y)^2 / 2, averaged over the batch
          out_grad[t.action] = (tape.output()[t.action] - y) * inv_b;
          online.backward(tape, out_grad, grad);
        }
        opt.apply(online.params(), grad);
        ++res.grad_steps;
        if (res.grad_steps % cfg.target_sync == 0) {
          target = online;
          if (on_sync) on_sync(online, target);
        }
      }
      if (step.done || (by_steps && res.env_steps >= cfg.max_steps)) {
        row.success = step.success;
        break;
      }
    }
    res.curve.push_back(row);
  }
  return res;
}

TrainResult a2c_train(Environment& env, const TrainConfig& cfg) {
  cfg.validate();
  check_env(env);
  const std::size_t A = env.num_actions();
  Rng init_rng(mix_seed(cfg.seed, kInitStream));
  Rng act_rng(mix_seed(cfg.seed, kActStream));

  TrainResult res{
      Mlp::he_uniform(layer_sizes(env.observation_size(), cfg.hidden, A + 1), init_rng), {}, 0, 0};
  Mlp& net = res.net;
  Optimizer opt(net.num_params(), cfg);
  std::vector<double> grad(net.num_params());
  const bool by_steps = cfg.max_steps > 0;

  struct Visit {
    Mlp::Tape tape;
    std::vector<double> probs;
    std::size_t action;
    double reward;
  };

  for (std::size_t ep = 0; by_steps ? res.env_steps < cfg.max_steps : ep < cfg.episodes; ++ep) {
    auto obs = env.reset(mix_seed(cfg.seed, 1000 + ep));
    if (obs.size() != net.input_size()) throw ConfigError("observation size changed after reset");
    CurveRow row;
    row.episode = ep;
    bool done = false;
    while (!done) {
      std::vector<Visit> seg;
      StepResult last;
      while (seg.size() < cfg.n_step && !done) {
        auto tape = net.forward_tape(obs);
        auto probs = stable_softmax(std::span(tape.output()).first(A));
        const std::size_t a = sample_categorical(probs, act_rng);
        last = env.step(a);
        ++res.env_steps;
        ++row.turns;
        row.reward += last.reward;
        seg.push_back({std::move(tape), std::move(probs), a, last.reward * cfg.reward_scale});
        obs = last.observation;
        done = last.done || (by_steps && res.env_steps >= cfg.max_steps);
      }
      double ret = 0.0;
      if (!(last.done && !last.truncated)) ret = net.forward(obs)[A];

      std::fill(grad.begin(), grad.end(), 0.0);
      const double inv_n = 1.0 / static_cast<double>(seg.size());
      std::vector<double> out_grad(A + 1);
      for (std::size_t t = seg.size(); t-- > 0;) {
        const auto& v = seg[t];
        ret = v.reward + cfg.gamma * ret;
        const double value = v.tape.output()[A];
        const double adv = ret - value;
        const double h = entropy(v.probs);
        const auto& logits = v.tape.output();
        for (std::size_t j = 0; j < A; ++j) {
          const double p = v.probs[j];
          // -log pi(a) * A, advantage held constant
          double g = adv * (p - (j == v.action ? 1.0 : 0.0));
          // -beta * H; dH/dz_j = -p_j (log p_j + H)
          if (p > 0.0) g += cfg.entropy_coef * p * (std::log(p) + h);
          // clipped logits pass no gradient
          if (logits[j] > 30.0 || logits[j] < -30.0) g = 0.0;
          out_grad[j] = g * inv_n;
        }
        out_grad[A] = -2.0 * cfg.value_coef * adv * inv_n;
        net.backward(v.tape, out_grad, grad);
      }
      opt.apply(net.params(), grad);
      ++res.grad_steps;
      if (done) row.success = last.success;
    }
    res.curve.push_back(row);
  }
  return res;
}

}  // namespace moviebot::policy
