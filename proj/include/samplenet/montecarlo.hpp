#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "samplenet/binary_edge.hpp"
#include "samplenet/gaussian.hpp"
#include "samplenet/network.hpp"
#include "samplenet/run_config.hpp"
#include "samplenet/stats.hpp"

namespace samplenet::montecarlo {

/// Reports are flagged when an estimate is further than this many standard
/// errors from its target.
inline constexpr double kSignificance = 4.0;

/// Threshold event {theta <= u}, mixing weight lambda, observer i, observed j.
struct DiagnosticSpec {
  double u = 0.0;
  double lambda = 0.5;
  int observer = 0;
  int observed = 1;

  void validate() const;
};

/// Largest |posterior-mean difference| between agents of the same connected
/// component at round t.
double agreement_gap(const gaussian::GaussianTrajectory& tr, const NetworkGraph& g, int t);
double agreement_gap(const binary_edge::EdgeRun& run, int t);

/// max_i |X_i(t) - X(inf)| where X(inf) is the full-information mean.
double oracle_gap(const gaussian::GaussianTrajectory& tr, const gaussian::GaussianSignalStructure& s,
                  int t);
/// max_a |b_a(t) - true_posterior(x1, x2)|.
double oracle_gap(const binary_edge::EdgeRun& run, int t);

/// F_it(u) = P(theta <= u | H_i(t)) for the Gaussian posterior.
double posterior_cdf(const gaussian::GaussianTrajectory& tr, int agent, int t, double u);

/// Z1(T) = lambda F_iT(u) + (1 - lambda)/T sum_{t<T} 1{Y_j(t) <= u}.
/// F_iT stands in for the unobservable limit F_i(inf). Throws
/// ValidationError unless i and j are adjacent.
double z1_estimate(const gaussian::GaussianTrajectory& tr, const NetworkGraph& g,
                   const DiagnosticSpec& spec, int horizon);

/// 1{Y_j(t) <= u} - F_jt(u) for t < T.
std::vector<double> indicator_increments(const gaussian::GaussianTrajectory& tr, int agent, double u);
/// Y_j(t) - X_j(t) for t < T.
std::vector<double> message_increments(const gaussian::GaussianTrajectory& tr, int agent);
/// y_a(t) - b_a(t) for t < T; the binary analogue of the above.
std::vector<double> message_increments(const binary_edge::EdgeRun& run, int agent);

struct CovarianceEstimate {
  double estimate = 0.0;
  double stderr = 0.0;
  long samples = 0;
  bool same_time = false;   // t1 == t2: the estimate is a variance
  bool degenerate = false;  // zero spread across replicas
  bool flagged = false;     // |estimate| > 4 stderr for t1 < t2
};

/// Replica average of d(t1) d(t2) over per-replica increment series.
CovarianceEstimate increment_orthogonality(std::span<const std::vector<double>> series, int t1,
                                           int t2);

struct AveragingReport {
  double m11 = 0.0;
  double m12 = 0.0;
  double m22 = 0.0;
  double curvature = 0.0;  // M11 + M22 - 2 M12 = E[(Z1 - Z2)^2]
  double slope = 0.0;      // 2 (M12 - M22)
  double minimizer = 0.0;  // argmin over lambda in [0, 1]
  double min_value = 0.0;
  bool interior = false;
  bool constant = false;   // quadratic flat: Z1 = Z2 in mean square
};

/// Fits E[(lambda Z1 + (1 - lambda) Z2)^2] from empirical second moments.
AveragingReport averaging_strictly_helps_check(std::span<const std::pair<double, double>> samples);

struct VarianceIdentityReport {
  int agent = 0;
  int round = 0;
  double empirical = 0.0;
  double stderr = 0.0;
  double total_variance_form = 0.0;  // 1 - sigma_i(t)
  double product_form = 0.0;         // sigma_i(t) (1 - sigma_i(t))
  bool matches_total_variance = false;
  bool matches_product = false;
  std::string matching;  // "1-sigma", "sigma(1-sigma)", "both" or "neither"
};

struct Z1Report {
  double u = 0.0;
  double mean = 0.0;
  double stderr = 0.0;
  double target = 0.0;  // Phi(u)
  bool within = false;
};

struct IncrementReport {
  std::string kind;  // "indicator" or "message"
  double u = 0.0;
  int t1 = 0;
  int t2 = 0;
  CovarianceEstimate estimate;
};

struct GapSummary {
  int round = 0;
  stats::QuantileSet agreement;
  stats::QuantileSet oracle;
};

struct ReplicaSummary {
  Engine engine = Engine::Gaussian;
  long replicas = 0;
  std::uint64_t master_seed = 0;
  std::vector<GapSummary> gaps;
  std::vector<Z1Report> z1;
  std::vector<IncrementReport> increments;
  std::vector<VarianceIdentityReport> variance_identity;
  std::vector<std::pair<double, AveragingReport>> averaging;  // keyed by threshold u
  std::vector<gaussian::JitterEvent> jitter_events;

  const GapSummary& gap_at(int round) const;
};

/// Per-replica callbacks, invoked in replica order on the calling thread.
struct ReplicaObserver {
  std::function<void(const gaussian::GaussianTrajectory&)> on_gaussian;
  std::function<void(const binary_edge::EdgeRun&)> on_edge;
};

/// Runs config.replicas independent replicas on config.workers threads and
/// aggregates the diagnostics. The summary depends only on the config.
ReplicaSummary run_replicas(const RunConfig& config, const ReplicaObserver& observer = {});

}  // namespace samplenet::montecarlo
