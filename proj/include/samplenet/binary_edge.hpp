#pragma once

// Two agents on a single edge, binary state theta in {0, 1} with a uniform
// prior, private signals with density 2x (theta = 1) or 2 - 2x (theta = 0) on
// [0, 1]. Each round both agents simultaneously send a binary message:
//
//   sampling mode: 1 with probability equal to the current posterior,
//   action mode:   1 iff the current posterior is at least 1/2.
//
// Inference is transcript-conditional. Agent a's posterior given its signal x
// and the opponent's messages has the closed form
//
//   p_a(t; x) = x r / (x r + 1 - x),   r = M1 / M0,
//   M_theta   = integral of f(s | theta) * lik_b(s) over the opponent signal s,
//
// where lik_b(s) is the probability the opponent would have sent its observed
// messages had its signal been s. lik_b in turn needs the opponent's
// hypothetical curve p_b(t; s), which depends on a's own messages; so every
// round each agent replays its own message through the opponent's curve and
// the two curves are updated together. An agent's own messages never enter
// its own belief: they are samples of information it already has.
//
// Sampling mode integrates over a midpoint grid in s, accumulating lik_b in
// log space. In action mode lik_b is the indicator of an interval (curves are
// increasing in the signal), which is integrated exactly.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace samplenet::binary_edge {

enum class Mode { Sampling, Action };

Mode parse_mode(std::string_view name);
std::string_view to_string(Mode mode);

struct BinarySignalModel {
  static constexpr double prior_one = 0.5;
  /// f(x | theta); zero outside [0, 1].
  static double density(double x, int theta);
};

/// P(theta = 1 | x1, x2). Throws UndefinedPosterior for (0, 1) and (1, 0).
double true_posterior(double x1, double x2);

/// Action-mode belief once both agents have sent 1: 6x / (2 + 4x), x in (1/2, 1].
double action_limit_posterior(double x);

/// Bernoulli parameters are clamped to [eps, 1 - eps] before taking logs.
inline constexpr double kClampEpsilon = 1e-12;

struct SignalInterval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

class BinaryEdgeState {
 public:
  int round() const { return round_; }
  Mode mode() const { return mode_; }
  int grid_size() const { return static_cast<int>(grid_.size()); }
  std::span<const double> grid() const { return grid_; }
  double signal(int agent) const { return signal_.at(agent); }

  /// p_a(t; g_k) at every grid midpoint.
  std::span<const double> curve(int agent) const { return curve_.at(agent); }
  /// Log-likelihood of agent a's sent messages as a function of its
  /// hypothetical signal, shifted so the maximum is 0. Sampling mode only.
  std::span<const double> loglik(int agent) const { return loglik_.at(agent); }
  /// Signals of agent a consistent with its action-mode messages.
  SignalInterval support(int agent) const { return support_.at(agent); }
  /// log(M1 / M0) from the opponent's messages.
  double evidence_log_odds(int agent) const { return log_odds_.at(agent); }
  const std::vector<std::array<int, 2>>& transcript() const { return transcript_; }

  /// p_a(t; x) for an arbitrary signal value x in [0, 1].
  double belief_at(int agent, double x) const;

 private:
  friend BinaryEdgeState init_edge_state(double, double, int, Mode);
  friend BinaryEdgeState apply_messages(BinaryEdgeState, std::array<int, 2>);

  void refresh_curves();

  int round_ = 0;
  Mode mode_ = Mode::Sampling;
  std::vector<double> grid_;
  std::vector<double> grid_logit_;
  std::array<double, 2> signal_{};
  std::array<std::vector<double>, 2> curve_;
  std::array<std::vector<double>, 2> loglik_;
  std::array<SignalInterval, 2> support_{};
  std::array<double, 2> log_odds_{};
  std::vector<std::array<int, 2>> transcript_;
};

BinaryEdgeState init_edge_state(double x1, double x2, int grid_size, Mode mode);

/// Messages both agents send from the current state. Deterministic in action
/// mode; in sampling mode each agent's draw uses its own substream.
std::array<int, 2> draw_messages(const BinaryEdgeState& state, std::uint64_t seed,
                                 std::uint64_t replica);

/// Conditions both agents on an externally supplied message pair. Throws
/// InconsistentTranscript if an action-mode message has empty support.
BinaryEdgeState apply_messages(BinaryEdgeState state, std::array<int, 2> messages);

/// draw_messages followed by apply_messages.
BinaryEdgeState step_edge(BinaryEdgeState state, std::uint64_t seed, std::uint64_t replica = 0);

/// The agent's actual belief, i.e. its curve at its realized signal.
double belief_of(const BinaryEdgeState& state, int agent);

struct EdgeRun {
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  Mode mode = Mode::Sampling;
  double x1 = 0.0;
  double x2 = 0.0;
  std::vector<std::array<double, 2>> beliefs;  // rounds 0..T
  std::vector<std::array<int, 2>> messages;    // rounds 0..T-1
  double true_posterior = 0.5;

  int horizon() const { return static_cast<int>(messages.size()); }
};

EdgeRun run_edge(double x1, double x2, int horizon, Mode mode, int grid_size, std::uint64_t seed,
                 std::uint64_t replica = 0);

}  // namespace samplenet::binary_edge
