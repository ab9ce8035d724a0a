#include "samplenet/binary_edge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "samplenet/errors.hpp"
#include "samplenet/random.hpp"

namespace samplenet::binary_edge {
namespace {

void check_signal(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ValidationError(std::string(name) + " must lie in [0, 1], got " + std::to_string(x));
  }
}

double logit(double x) { return std::log(x) - std::log1p(-x); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Posterior for a signal with log-likelihood-ratio `log_odds` of outside
// evidence. Signals at the ends of [0, 1] are fully revealing.
double closed_form_belief(double x, double log_odds) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return sigmoid(logit(x) + log_odds);
}

// Opponent signals at or above this value make the opponent send action 1.
double action_threshold(double opponent_log_odds) { return sigmoid(-opponent_log_odds); }

}  // namespace

Mode parse_mode(std::string_view name) {
  if (name == "sampling") return Mode::Sampling;
  if (name == "action") return Mode::Action;
  throw ValidationError("unknown mode '" + std::string(name) + "' (expected sampling or action)");
}

std::string_view to_string(Mode mode) { return mode == Mode::Sampling ? "sampling" : "action"; }

double BinarySignalModel::density(double x, int theta) {
  if (x < 0.0 || x > 1.0) return 0.0;
  return theta == 1 ? 2.0 * x : 2.0 - 2.0 * x;
}

double true_posterior(double x1, double x2) {
  check_signal(x1, "x1");
  check_signal(x2, "x2");
  const double num = x1 * x2;
  const double den = num + (1.0 - x1) * (1.0 - x2);
  if (den == 0.0) {
    throw UndefinedPosterior("signals (" + std::to_string(x1) + ", " + std::to_string(x2) +
                             ") rule out both states");
  }
  return num / den;
}

double action_limit_posterior(double x) {
  if (!(x > 0.5 && x <= 1.0)) {
    throw ValidationError("action_limit_posterior needs x in (0.5, 1], got " + std::to_string(x));
  }
  return 6.0 * x / (2.0 + 4.0 * x);
}

double BinaryEdgeState::belief_at(int agent, double x) const {
  return closed_form_belief(x, log_odds_.at(agent));
}

void BinaryEdgeState::refresh_curves() {
  for (int a = 0; a < 2; ++a) {
    auto& c = curve_[a];
    for (std::size_t k = 0; k < grid_.size(); ++k) c[k] = sigmoid(grid_logit_[k] + log_odds_[a]);
  }
}

BinaryEdgeState init_edge_state(double x1, double x2, int grid_size, Mode mode) {
  check_signal(x1, "x1");
  check_signal(x2, "x2");
  if (grid_size < 2) throw ValidationError("grid_size must be >= 2");
  BinaryEdgeState st;
  st.mode_ = mode;
  st.signal_ = {x1, x2};
  st.grid_.resize(grid_size);
  st.grid_logit_.resize(grid_size);
  for (int k = 0; k < grid_size; ++k) {
    st.grid_[k] = (k + 0.5) / grid_size;
    st.grid_logit_[k] = logit(st.grid_[k]);
  }
  for (int a = 0; a < 2; ++a) {
    st.curve_[a].assign(grid_size, 0.0);
    st.loglik_[a].assign(grid_size, 0.0);
  }
  st.refresh_curves();
  return st;
}

std::array<int, 2> draw_messages(const BinaryEdgeState& st, std::uint64_t seed,
                                 std::uint64_t replica) {
  std::array<int, 2> y{};
  for (int a = 0; a < 2; ++a) {
    if (st.mode() == Mode::Action) {
      // Same rule the opponent uses to model a, so the realized signal is
      // always inside its own support. A belief of exactly 1/2 sends 1.
      y[a] = st.signal(a) >= action_threshold(st.evidence_log_odds(a)) ? 1 : 0;
    } else {
      SplitMix64 rng(StreamKey{seed, replica, static_cast<std::uint32_t>(a),
                               static_cast<std::uint32_t>(st.round()), DrawKind::Message});
      y[a] = rng.bernoulli(belief_of(st, a)) ? 1 : 0;
    }
  }
  return y;
}

BinaryEdgeState apply_messages(BinaryEdgeState st, std::array<int, 2> y) {
  for (int v : y) {
    if (v != 0 && v != 1) throw ValidationError("messages must be 0 or 1");
  }
  const std::size_t G = st.grid_.size();

  // Likelihood of each agent's message under each of its hypothetical signals,
  // evaluated with the round-t curves before either agent updates.
  for (int a = 0; a < 2; ++a) {
    if (st.mode_ == Mode::Sampling) {
      auto& L = st.loglik_[a];
      const auto& c = st.curve_[a];
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < G; ++k) {
        const double p = std::clamp(c[k], kClampEpsilon, 1.0 - kClampEpsilon);
        L[k] += y[a] == 1 ? std::log(p) : std::log1p(-p);
        peak = std::max(peak, L[k]);
      }
      for (auto& v : L) v -= peak;
    } else {
      auto& sup = st.support_[a];
      const double cut = action_threshold(st.log_odds_[a]);
      if (y[a] == 1) {
        sup.lo = std::max(sup.lo, cut);
      } else {
        sup.hi = std::min(sup.hi, cut);
      }
      if (!(sup.length() > 0.0)) {
        throw InconsistentTranscript("agent " + std::to_string(a) + " sent " +
                                     std::to_string(y[a]) + " at round " +
                                     std::to_string(st.round_) +
                                     ", which no signal value could produce");
      }
    }
  }

  // Agent a's evidence comes from the opponent b = 1 - a.
  std::array<double, 2> next_odds{};
  for (int a = 0; a < 2; ++a) {
    const int b = 1 - a;
    double m1 = 0.0;
    double m0 = 0.0;
    if (st.mode_ == Mode::Sampling) {
      const auto& L = st.loglik_[b];
      for (std::size_t k = 0; k < G; ++k) {
        const double w = std::exp(L[k]);
        m1 += st.grid_[k] * w;
        m0 += (1.0 - st.grid_[k]) * w;
      }
    } else {
      const auto [lo, hi] = st.support_[b];
      m1 = hi * hi - lo * lo;
      m0 = 2.0 * (hi - lo) - m1;
    }
    next_odds[a] = std::log(m1) - std::log(m0);
  }
  st.log_odds_ = next_odds;
  st.transcript_.push_back(y);
  ++st.round_;
  st.refresh_curves();
  return st;
}

BinaryEdgeState step_edge(BinaryEdgeState st, std::uint64_t seed, std::uint64_t replica) {
  const auto y = draw_messages(st, seed, replica);
  return apply_messages(std::move(st), y);
}

double belief_of(const BinaryEdgeState& st, int agent) {
  return st.belief_at(agent, st.signal(agent));
}

EdgeRun run_edge(double x1, double x2, int horizon, Mode mode, int grid_size, std::uint64_t seed,
                 std::uint64_t replica) {
  if (horizon < 1) throw ValidationError("horizon T must be >= 1");
  EdgeRun run;
  run.seed = seed;
  run.replica = replica;
  run.mode = mode;
  run.x1 = x1;
  run.x2 = x2;
  run.true_posterior = true_posterior(x1, x2);
  auto st = init_edge_state(x1, x2, grid_size, mode);
  run.beliefs.reserve(static_cast<std::size_t>(horizon) + 1);
  run.messages.reserve(static_cast<std::size_t>(horizon));
  run.beliefs.push_back({belief_of(st, 0), belief_of(st, 1)});
  for (int t = 0; t < horizon; ++t) {
    const auto y = draw_messages(st, seed, replica);
    st = apply_messages(std::move(st), y);
    run.messages.push_back(y);
    run.beliefs.push_back({belief_of(st, 0), belief_of(st, 1)});
  }
  return run;
}

}  // namespace samplenet::binary_edge
