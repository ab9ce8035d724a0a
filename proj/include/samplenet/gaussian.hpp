#pragma once

// Gaussian sampling model on a network, scalar state.
//
// theta ~ N(0, 1), S_i = a_i * theta + eps_i with eps_i ~ N(0, 1). The history
// of agent i at round t is H_i(t) = (S_i, Y_j(s) for s < t, j in nbrs(i)),
// laid out as the signal followed by one block per round holding the
// neighbor messages in ascending neighbor order. Conditional on theta every
// history is Gaussian with mean theta * mu_i(t) and cross covariances
// Sigma_ij(t); the moment state tracks these exactly and the posterior of
// agent i is N(<w_i, H_i>, sigma_i).

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "samplenet/network.hpp"

namespace samplenet::gaussian {

struct GaussianSignalStructure {
  std::vector<double> a;

  /// Validates that every coefficient is finite.
  static GaussianSignalStructure from_coefficients(std::vector<double> a);
  int size() const { return static_cast<int>(a.size()); }
};

struct GaussianPosterior {
  double variance = 1.0;       // sigma_i(t)
  Eigen::VectorXd weights;     // w_i(t), X_i(t) = <w_i(t), H_i(t)>
  double precision_gain = 0.0; // mu^T Sigma^{-1} mu; sigma = 1 / (gain + 1)

  double mean(const Eigen::Ref<const Eigen::VectorXd>& history) const;
};

struct JitterEvent {
  int agent = 0;
  int round = 0;
};

/// Conditional moments of every agent's history at one round.
class GaussianMomentState {
 public:
  int round() const { return round_; }
  int agents() const { return static_cast<int>(mu_.size()); }
  int dim(int i) const { return static_cast<int>(mu_.at(i).size()); }

  const Eigen::VectorXd& mean_coeffs(int i) const { return mu_.at(i); }
  /// Sigma_ij(t). Only i <= j is stored; the other orientation is a transpose.
  Eigen::MatrixXd covariance(int i, int j) const;
  /// Lower Cholesky factor of Sigma_ii(t), grown one round at a time.
  const Eigen::MatrixXd& cholesky(int i) const { return chol_.at(i); }
  const std::vector<JitterEvent>& jitter_events() const { return jitter_; }

 private:
  friend GaussianMomentState init_moments(const NetworkGraph&, const GaussianSignalStructure&);
  friend GaussianMomentState step_moments(GaussianMomentState, const NetworkGraph&);

  std::size_t pair_index(int i, int j) const;

  int round_ = 0;
  std::vector<Eigen::VectorXd> mu_;
  std::vector<Eigen::MatrixXd> sigma_;  // upper-triangular pair map
  std::vector<Eigen::MatrixXd> chol_;
  std::vector<JitterEvent> jitter_;
};

GaussianMomentState init_moments(const NetworkGraph& g, const GaussianSignalStructure& s);

/// sigma_i(t) and w_i(t). Throws NumericalDegeneracy when the condition
/// estimate of Sigma_ii(t) exceeds 1e12.
GaussianPosterior posterior_params(const GaussianMomentState& state, int i);

/// Advances the moment state by one round of simultaneous messages.
GaussianMomentState step_moments(GaussianMomentState state, const NetworkGraph& g);

/// Posterior parameters of every agent for rounds 0..horizon.
struct PosteriorSchedule {
  int horizon = 0;
  std::vector<std::vector<GaussianPosterior>> rounds;  // [t][agent]
  std::vector<JitterEvent> jitter_events;

  const GaussianPosterior& at(int t, int i) const { return rounds.at(t).at(i); }
  /// (horizon + 1) x n matrix of sigma_i(t).
  Eigen::MatrixXd variances() const;
};

PosteriorSchedule compute_schedule(const NetworkGraph& g, const GaussianSignalStructure& s,
                                   int horizon);

/// One seeded realization. Row t of post_means / post_vars is round t
/// (0..T); row t of messages holds Y_i(t) for t < T.
struct GaussianTrajectory {
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  double theta = 0.0;
  Eigen::VectorXd signals;
  Eigen::MatrixXd messages;
  Eigen::MatrixXd post_means;
  Eigen::MatrixXd post_vars;

  int horizon() const { return static_cast<int>(messages.rows()); }
  int agents() const { return static_cast<int>(signals.size()); }
};

GaussianTrajectory simulate_realization(const NetworkGraph& g, const GaussianSignalStructure& s,
                                        int horizon, std::uint64_t seed,
                                        std::uint64_t replica = 0);

/// Same as above with the deterministic moment work done once up front.
GaussianTrajectory simulate_realization(const NetworkGraph& g, const GaussianSignalStructure& s,
                                        const PosteriorSchedule& schedule, std::uint64_t seed,
                                        std::uint64_t replica);

struct OraclePosterior {
  double mean = 0.0;
  double variance = 1.0;
};

/// Full-information posterior Law(theta | S_1..S_n).
OraclePosterior bayes_oracle(const GaussianSignalStructure& s, std::span<const double> signals);

}  // namespace samplenet::gaussian
