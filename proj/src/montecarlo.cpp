#include "samplenet/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "samplenet/errors.hpp"

namespace samplenet::montecarlo {

void DiagnosticSpec::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ValidationError("lambda must lie in [0, 1], got " + std::to_string(lambda));
  }
  if (!std::isfinite(u)) throw ValidationError("threshold u must be finite");
}

double agreement_gap(const gaussian::GaussianTrajectory& tr, const NetworkGraph& g, int t) {
  const auto comp = g.components();
  double gap = 0.0;
  for (int i = 0; i < tr.agents(); ++i) {
    for (int j = i + 1; j < tr.agents(); ++j) {
      if (comp[i] != comp[j]) continue;
      gap = std::max(gap, std::abs(tr.post_means(t, i) - tr.post_means(t, j)));
    }
  }
  return gap;
}

double agreement_gap(const binary_edge::EdgeRun& run, int t) {
  const auto& b = run.beliefs.at(t);
  return std::abs(b[0] - b[1]);
}

double oracle_gap(const gaussian::GaussianTrajectory& tr, const gaussian::GaussianSignalStructure& s,
                  int t) {
  const auto oracle = gaussian::bayes_oracle(
      s, std::span<const double>(tr.signals.data(), static_cast<std::size_t>(tr.signals.size())));
  double gap = 0.0;
  for (int i = 0; i < tr.agents(); ++i) {
    gap = std::max(gap, std::abs(tr.post_means(t, i) - oracle.mean));
  }
  return gap;
}

double oracle_gap(const binary_edge::EdgeRun& run, int t) {
  const auto& b = run.beliefs.at(t);
  return std::max(std::abs(b[0] - run.true_posterior), std::abs(b[1] - run.true_posterior));
}

double posterior_cdf(const gaussian::GaussianTrajectory& tr, int agent, int t, double u) {
  return stats::normal_cdf((u - tr.post_means(t, agent)) / std::sqrt(tr.post_vars(t, agent)));
}

double z1_estimate(const gaussian::GaussianTrajectory& tr, const NetworkGraph& g,
                   const DiagnosticSpec& spec, int horizon) {
  spec.validate();
  if (!g.adjacent(spec.observer, spec.observed)) {
    throw ValidationError("agents " + std::to_string(spec.observer) + " and " +
                          std::to_string(spec.observed) +
                          " are not adjacent; agent " + std::to_string(spec.observer) +
                          " never observes the messages of agent " +
                          std::to_string(spec.observed));
  }
  if (horizon < 1 || horizon > tr.horizon()) {
    throw ValidationError("z1 horizon must lie in [1, " + std::to_string(tr.horizon()) + "]");
  }
  double hits = 0.0;
  for (int t = 0; t < horizon; ++t) {
    if (tr.messages(t, spec.observed) <= spec.u) hits += 1.0;
  }
  return spec.lambda * posterior_cdf(tr, spec.observer, horizon, spec.u) +
         (1.0 - spec.lambda) * hits / horizon;
}

std::vector<double> indicator_increments(const gaussian::GaussianTrajectory& tr, int agent,
                                         double u) {
  std::vector<double> out(tr.horizon());
  for (int t = 0; t < tr.horizon(); ++t) {
    const double hit = tr.messages(t, agent) <= u ? 1.0 : 0.0;
    out[t] = hit - posterior_cdf(tr, agent, t, u);
  }
  return out;
}

std::vector<double> message_increments(const gaussian::GaussianTrajectory& tr, int agent) {
  std::vector<double> out(tr.horizon());
  for (int t = 0; t < tr.horizon(); ++t) out[t] = tr.messages(t, agent) - tr.post_means(t, agent);
  return out;
}

std::vector<double> message_increments(const binary_edge::EdgeRun& run, int agent) {
  std::vector<double> out(run.horizon());
  for (int t = 0; t < run.horizon(); ++t) out[t] = run.messages[t][agent] - run.beliefs[t][agent];
  return out;
}

CovarianceEstimate increment_orthogonality(std::span<const std::vector<double>> series, int t1,
                                           int t2) {
  if (t1 > t2) std::swap(t1, t2);
  if (t1 < 0) throw ValidationError("increment rounds must be nonnegative");
  std::vector<double> products;
  products.reserve(series.size());
  for (const auto& s : series) {
    if (t2 >= static_cast<int>(s.size())) {
      throw ValidationError("increment round " + std::to_string(t2) + " is beyond the horizon " +
                            std::to_string(s.size()));
    }
    products.push_back(s[t1] * s[t2]);
  }
  CovarianceEstimate est;
  est.samples = static_cast<long>(products.size());
  est.estimate = stats::mean(products);
  est.stderr = stats::standard_error(products);
  est.same_time = t1 == t2;
  est.degenerate = est.stderr == 0.0;
  est.flagged = !est.same_time && !est.degenerate &&
                std::abs(est.estimate) > kSignificance * est.stderr;
  return est;
}

AveragingReport averaging_strictly_helps_check(std::span<const std::pair<double, double>> samples) {
  AveragingReport r;
  if (samples.empty()) return r;
  for (auto [z1, z2] : samples) {
    r.m11 += z1 * z1;
    r.m12 += z1 * z2;
    r.m22 += z2 * z2;
  }
  const auto n = static_cast<double>(samples.size());
  r.m11 /= n;
  r.m12 /= n;
  r.m22 /= n;
  // E[Z(lambda)^2] = curvature lambda^2 + slope lambda + M22
  r.curvature = r.m11 + r.m22 - 2.0 * r.m12;
  r.slope = 2.0 * (r.m12 - r.m22);
  const double tol = 1e-12 * std::max(1.0, r.m11 + r.m22);
  r.constant = std::abs(r.curvature) <= tol && std::abs(r.slope) <= tol;
  auto value = [&](double lam) { return r.curvature * lam * lam + r.slope * lam + r.m22; };
  if (r.curvature > tol) {
    r.minimizer = std::clamp(-r.slope / (2.0 * r.curvature), 0.0, 1.0);
  } else {
    r.minimizer = value(1.0) < value(0.0) ? 1.0 : 0.0;
  }
  r.min_value = value(r.minimizer);
  r.interior = r.curvature > tol && r.minimizer > 0.0 && r.minimizer < 1.0;
  return r;
}

const GapSummary& ReplicaSummary::gap_at(int round) const {
  for (const auto& g : gaps) {
    if (g.round == round) return g;
  }
  throw ValidationError("no gap summary recorded at round " + std::to_string(round));
}

namespace {

// Everything aggregation needs from one replica.
struct ReplicaRecord {
  std::vector<double> agreement;  // per checkpoint
  std::vector<double> oracle;
  std::vector<double> z1;             // per threshold
  std::vector<double> indicator_inc;  // per threshold: d(t1), d(t2) pairs
  std::array<double, 2> message_inc{};
  std::vector<double> means_at_variance_round;  // per agent
  std::vector<std::pair<double, double>> averaging_pairs;  // per threshold
};

template <typename Work>
void parallel_for(long begin, long end, int workers, Work&& work) {
  const long count = end - begin;
  if (count <= 0) return;
  const int threads = static_cast<int>(std::clamp<long>(workers, 1, count));
  std::atomic<long> next{begin};
  std::mutex err_mutex;
  long err_replica = -1;
  std::exception_ptr err;
  auto body = [&] {
    for (long r = next.fetch_add(1); r < end; r = next.fetch_add(1)) {
      try {
        work(r);
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (err_replica < 0 || r < err_replica) {
          err_replica = r;
          err = std::current_exception();
        }
      }
    }
  };
  if (threads == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int k = 0; k < threads; ++k) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  if (err) {
    try {
      std::rethrow_exception(err);
    } catch (const NumericalDegeneracy& e) {
      throw ReplicaError(err_replica, e.what(), true);
    } catch (const std::exception& e) {
      throw ReplicaError(err_replica, e.what(), false);
    }
  }
}

ReplicaRecord gaussian_record(const gaussian::GaussianTrajectory& tr, const NetworkGraph& g,
                              const gaussian::GaussianSignalStructure& s,
                              const std::vector<int>& checkpoints,
                              const std::optional<DiagnosticsSpec>& diag) {
  ReplicaRecord rec;
  for (int t : checkpoints) {
    rec.agreement.push_back(agreement_gap(tr, g, t));
    rec.oracle.push_back(oracle_gap(tr, s, t));
  }
  if (!diag) return rec;
  const int T = tr.horizon();
  for (double u : diag->thresholds) {
    DiagnosticSpec spec{u, diag->lambda, diag->observer, diag->observed};
    rec.z1.push_back(z1_estimate(tr, g, spec, T));
    const auto inc = indicator_increments(tr, diag->observed, u);
    rec.indicator_inc.push_back(inc[diag->t1]);
    rec.indicator_inc.push_back(inc[diag->t2]);
    const double truth = tr.theta <= u ? 1.0 : 0.0;
    rec.averaging_pairs.emplace_back(posterior_cdf(tr, diag->observer, T, u) - truth,
                                     posterior_cdf(tr, diag->observed, T, u) - truth);
  }
  const auto raw = message_increments(tr, diag->observed);
  rec.message_inc = {raw[diag->t1], raw[diag->t2]};
  for (int i = 0; i < tr.agents(); ++i) {
    rec.means_at_variance_round.push_back(tr.post_means(diag->variance_round, i));
  }
  return rec;
}

ReplicaRecord edge_record(const binary_edge::EdgeRun& run, const std::vector<int>& checkpoints,
                          const std::optional<DiagnosticsSpec>& diag) {
  ReplicaRecord rec;
  for (int t : checkpoints) {
    rec.agreement.push_back(agreement_gap(run, t));
    rec.oracle.push_back(oracle_gap(run, t));
  }
  if (diag) {
    const auto inc = message_increments(run, diag->observed);
    rec.message_inc = {inc[diag->t1], inc[diag->t2]};
  }
  return rec;
}

std::vector<double> column(const std::vector<ReplicaRecord>& recs,
                           std::vector<double> ReplicaRecord::*field, std::size_t idx) {
  std::vector<double> out;
  out.reserve(recs.size());
  for (const auto& r : recs) out.push_back((r.*field)[idx]);
  return out;
}

CovarianceEstimate pair_estimate(std::vector<std::vector<double>> series) {
  return increment_orthogonality(series, 0, 1);
}

}  // namespace

ReplicaSummary run_replicas(const RunConfig& config, const ReplicaObserver& observer) {
  config.validate();
  const auto g = config.graph();
  const auto checkpoints = config.effective_checkpoints();
  const auto& diag = config.diagnostics;
  const long R = config.replicas;
  const int T = config.horizon;

  ReplicaSummary summary;
  summary.engine = config.engine;
  summary.replicas = R;
  summary.master_seed = config.master_seed;

  std::vector<ReplicaRecord> records(static_cast<std::size_t>(R));
  // Replicas run in chunks so trajectories can be handed to the observer in
  // order without holding all of them at once.
  constexpr long kChunk = 256;

  if (config.engine == Engine::Gaussian) {
    const auto s = gaussian::GaussianSignalStructure::from_coefficients(config.a);
    const auto schedule = gaussian::compute_schedule(g, s, T);
    summary.jitter_events = schedule.jitter_events;
    const bool keep = static_cast<bool>(observer.on_gaussian);
    std::vector<gaussian::GaussianTrajectory> buffer(keep ? kChunk : 0);
    for (long start = 0; start < R; start += kChunk) {
      const long stop = std::min(R, start + kChunk);
      parallel_for(start, stop, config.workers, [&](long r) {
        auto tr = gaussian::simulate_realization(g, s, schedule, config.master_seed,
                                                 static_cast<std::uint64_t>(r));
        records[r] = gaussian_record(tr, g, s, checkpoints, diag);
        if (keep) buffer[r - start] = std::move(tr);
      });
      if (keep) {
        for (long r = start; r < stop; ++r) observer.on_gaussian(buffer[r - start]);
      }
    }
  } else {
    const bool keep = static_cast<bool>(observer.on_edge);
    std::vector<binary_edge::EdgeRun> buffer(keep ? kChunk : 0);
    for (long start = 0; start < R; start += kChunk) {
      const long stop = std::min(R, start + kChunk);
      parallel_for(start, stop, config.workers, [&](long r) {
        auto run = binary_edge::run_edge(*config.x1, *config.x2, T, config.mode, config.grid_size,
                                         config.master_seed, static_cast<std::uint64_t>(r));
        records[r] = edge_record(run, checkpoints, diag);
        if (keep) buffer[r - start] = std::move(run);
      });
      if (keep) {
        for (long r = start; r < stop; ++r) observer.on_edge(buffer[r - start]);
      }
    }
  }

  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    summary.gaps.push_back({checkpoints[c],
                            stats::quantiles(column(records, &ReplicaRecord::agreement, c)),
                            stats::quantiles(column(records, &ReplicaRecord::oracle, c))});
  }
  if (!diag) return summary;

  auto message_series = [&] {
    std::vector<std::vector<double>> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back({r.message_inc[0], r.message_inc[1]});
    return out;
  };
  if (config.engine == Engine::BinaryEdge) {
    auto est = pair_estimate(message_series());
    est.same_time = diag->t1 == diag->t2;
    if (est.same_time) est.flagged = false;
    summary.increments.push_back({"message", 0.0, diag->t1, diag->t2, est});
    return summary;
  }

  const auto s = gaussian::GaussianSignalStructure::from_coefficients(config.a);
  for (std::size_t k = 0; k < diag->thresholds.size(); ++k) {
    const double u = diag->thresholds[k];
    const auto z = column(records, &ReplicaRecord::z1, k);
    Z1Report rep;
    rep.u = u;
    rep.mean = stats::mean(z);
    rep.stderr = stats::standard_error(z);
    rep.target = stats::normal_cdf(u);
    rep.within = std::abs(rep.mean - rep.target) <= kSignificance * rep.stderr;
    summary.z1.push_back(rep);

    std::vector<std::vector<double>> series;
    series.reserve(records.size());
    for (const auto& r : records) series.push_back({r.indicator_inc[2 * k], r.indicator_inc[2 * k + 1]});
    auto est = pair_estimate(std::move(series));
    est.same_time = diag->t1 == diag->t2;
    if (est.same_time) est.flagged = false;
    summary.increments.push_back({"indicator", u, diag->t1, diag->t2, est});

    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(records.size());
    for (const auto& r : records) pairs.push_back(r.averaging_pairs[k]);
    summary.averaging.emplace_back(u, averaging_strictly_helps_check(pairs));
  }
  {
    auto est = pair_estimate(message_series());
    est.same_time = diag->t1 == diag->t2;
    if (est.same_time) est.flagged = false;
    summary.increments.push_back({"message", 0.0, diag->t1, diag->t2, est});
  }

  const auto schedule_vars = gaussian::compute_schedule(g, s, diag->variance_round).variances();
  for (int i = 0; i < g.size(); ++i) {
    const auto xs = column(records, &ReplicaRecord::means_at_variance_round, i);
    const double m = stats::mean(xs);
    std::vector<double> sq;
    sq.reserve(xs.size());
    for (double x : xs) sq.push_back((x - m) * (x - m));
    VarianceIdentityReport rep;
    rep.agent = i;
    rep.round = diag->variance_round;
    rep.empirical = stats::sample_variance(xs);
    rep.stderr = stats::standard_error(sq);
    const double sigma = schedule_vars(diag->variance_round, i);
    rep.total_variance_form = 1.0 - sigma;
    rep.product_form = sigma * (1.0 - sigma);
    const double band = kSignificance * rep.stderr;
    rep.matches_total_variance = std::abs(rep.empirical - rep.total_variance_form) <= band;
    rep.matches_product = std::abs(rep.empirical - rep.product_form) <= band;
    rep.matching = rep.matches_total_variance && rep.matches_product ? "both"
                   : rep.matches_total_variance                     ? "1-sigma"
                   : rep.matches_product                            ? "sigma(1-sigma)"
                                                                    : "neither";
    summary.variance_identity.push_back(rep);
  }
  return summary;
}

}  // namespace samplenet::montecarlo
