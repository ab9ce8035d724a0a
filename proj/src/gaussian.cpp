#include "samplenet/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "samplenet/errors.hpp"
#include "samplenet/random.hpp"

namespace samplenet::gaussian {
namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kJitter = 1e-12;

// Lower bound on cond(L L^T) read off the Cholesky diagonal.
double condition_estimate(const Eigen::MatrixXd& chol) {
  const Eigen::VectorXd d = chol.diagonal().cwiseAbs();
  const double lo = d.minCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  const double ratio = d.maxCoeff() / lo;
  return ratio * ratio;
}

void check_condition(const Eigen::MatrixXd& chol, int agent, int round) {
  const double cond = condition_estimate(chol);
  if (!(cond <= kMaxCondition)) {
    throw NumericalDegeneracy(agent, round,
                              "history covariance is near-singular (condition estimate " +
                                  std::to_string(cond) + ")");
  }
}

}  // namespace

GaussianSignalStructure GaussianSignalStructure::from_coefficients(std::vector<double> a) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i])) {
      throw ValidationError("signal coefficient a[" + std::to_string(i) + "] is not finite");
    }
  }
  return GaussianSignalStructure{std::move(a)};
}

double GaussianPosterior::mean(const Eigen::Ref<const Eigen::VectorXd>& history) const {
  return weights.dot(history.head(weights.size()));
}

std::size_t GaussianMomentState::pair_index(int i, int j) const {
  const auto n = static_cast<std::size_t>(agents());
  const auto lo = static_cast<std::size_t>(std::min(i, j));
  const auto hi = static_cast<std::size_t>(std::max(i, j));
  return lo * (2 * n - lo + 1) / 2 + (hi - lo);
}

Eigen::MatrixXd GaussianMomentState::covariance(int i, int j) const {
  const auto& block = sigma_.at(pair_index(i, j));
  if (i <= j) return block;
  return block.transpose();
}

GaussianMomentState init_moments(const NetworkGraph& g, const GaussianSignalStructure& s) {
  const int n = g.size();
  if (s.size() != n) {
    throw ValidationError("signal structure has " + std::to_string(s.size()) +
                          " coefficients for a graph with " + std::to_string(n) + " agents");
  }
  GaussianMomentState st;
  st.round_ = 0;
  st.mu_.reserve(n);
  st.chol_.reserve(n);
  for (int i = 0; i < n; ++i) {
    st.mu_.push_back(Eigen::VectorXd::Constant(1, s.a[i]));
    st.chol_.push_back(Eigen::MatrixXd::Identity(1, 1));
  }
  st.sigma_.resize(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      st.sigma_[st.pair_index(i, j)] = Eigen::MatrixXd::Constant(1, 1, i == j ? 1.0 : 0.0);
    }
  }
  return st;
}

GaussianPosterior posterior_params(const GaussianMomentState& state, int i) {
  const auto& chol = state.cholesky(i);
  check_condition(chol, i, state.round());
  const auto L = chol.triangularView<Eigen::Lower>();
  const Eigen::VectorXd v = L.solve(state.mean_coeffs(i));
  GaussianPosterior post;
  post.precision_gain = v.squaredNorm();
  post.variance = 1.0 / (post.precision_gain + 1.0);
  post.weights = L.transpose().solve(v) * post.variance;
  return post;
}

GaussianMomentState step_moments(GaussianMomentState st, const NetworkGraph& g) {
  const int n = st.agents();
  if (g.size() != n) throw ValidationError("graph size does not match the moment state");

  std::vector<GaussianPosterior> post;
  post.reserve(n);
  for (int i = 0; i < n; ++i) post.push_back(posterior_params(st, i));

  // cov_hy[k][j] = Cov(H_k(t), Y_j(t) | theta) = Sigma_kj w_j
  std::vector<std::vector<Eigen::VectorXd>> cov_hy(n, std::vector<Eigen::VectorXd>(n));
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      const auto& block = st.sigma_[st.pair_index(k, j)];
      cov_hy[k][j] = k <= j ? Eigen::VectorXd(block * post[j].weights)
                            : Eigen::VectorXd(block.transpose() * post[j].weights);
    }
  }
  // Cov(Y_j, Y_m | theta) = w_j^T Sigma_jm w_m + 1{j = m} sigma_j
  Eigen::MatrixXd cov_yy(n, n);
  for (int j = 0; j < n; ++j) {
    for (int m = j; m < n; ++m) {
      double c = post[j].weights.dot(cov_hy[j][m]);
      if (j == m) c += post[j].variance;
      cov_yy(j, m) = c;
      cov_yy(m, j) = c;
    }
  }

  GaussianMomentState next;
  next.round_ = st.round_ + 1;
  next.jitter_ = std::move(st.jitter_);
  next.mu_.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto nb = g.neighbors(i);
    Eigen::VectorXd mu(st.mu_[i].size() + static_cast<Eigen::Index>(nb.size()));
    mu.head(st.mu_[i].size()) = st.mu_[i];
    for (std::size_t r = 0; r < nb.size(); ++r) {
      // E[Y_j | theta] / theta = gain / (gain + 1)
      const auto& pj = post[nb[r]];
      mu(st.mu_[i].size() + static_cast<Eigen::Index>(r)) = pj.precision_gain * pj.variance;
    }
    next.mu_[i] = std::move(mu);
  }

  next.sigma_.resize(st.sigma_.size());
  for (int k = 0; k < n; ++k) {
    const auto nk = g.neighbors(k);
    for (int l = k; l < n; ++l) {
      const auto nl = g.neighbors(l);
      auto& old = st.sigma_[st.pair_index(k, l)];
      const Eigen::Index rows = old.rows();
      const Eigen::Index cols = old.cols();
      Eigen::MatrixXd block(rows + static_cast<Eigen::Index>(nk.size()),
                            cols + static_cast<Eigen::Index>(nl.size()));
      block.topLeftCorner(rows, cols) = old;
      for (std::size_t c = 0; c < nl.size(); ++c) {
        block.block(0, cols + static_cast<Eigen::Index>(c), rows, 1) = cov_hy[k][nl[c]];
      }
      for (std::size_t r = 0; r < nk.size(); ++r) {
        block.block(rows + static_cast<Eigen::Index>(r), 0, 1, cols) =
            cov_hy[l][nk[r]].transpose();
        for (std::size_t c = 0; c < nl.size(); ++c) {
          block(rows + static_cast<Eigen::Index>(r), cols + static_cast<Eigen::Index>(c)) =
              cov_yy(nk[r], nl[c]);
        }
      }
      old.resize(0, 0);
      next.sigma_[next.pair_index(k, l)] = std::move(block);
    }
  }

  // Sigma_ii(t) is the leading block of Sigma_ii(t+1), so the factor grows
  // by a block row: L21 = (L^{-1} B)^T, L22 = chol(D - L21 L21^T).
  next.chol_.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& L = st.chol_[i];
    const Eigen::Index d = L.rows();
    const Eigen::Index deg = g.degree(i);
    if (deg == 0) {
      next.chol_[i] = std::move(st.chol_[i]);
      continue;
    }
    const auto& full = next.sigma_[next.pair_index(i, i)];
    const Eigen::MatrixXd x = L.triangularView<Eigen::Lower>().solve(full.topRightCorner(d, deg));
    Eigen::MatrixXd schur = full.bottomRightCorner(deg, deg) - x.transpose() * x;
    Eigen::LLT<Eigen::MatrixXd> llt(schur);
    if (llt.info() != Eigen::Success) {
      schur.diagonal().array() += kJitter;
      llt.compute(schur);
      if (llt.info() != Eigen::Success) {
        throw NumericalDegeneracy(i, next.round_, "history covariance is not positive definite");
      }
      next.jitter_.push_back({i, next.round_});
    }
    Eigen::MatrixXd grown = Eigen::MatrixXd::Zero(d + deg, d + deg);
    grown.topLeftCorner(d, d) = L;
    grown.bottomLeftCorner(deg, d) = x.transpose();
    grown.bottomRightCorner(deg, deg) = llt.matrixL();
    check_condition(grown, i, next.round_);
    next.chol_[i] = std::move(grown);
  }
  return next;
}

Eigen::MatrixXd PosteriorSchedule::variances() const {
  const auto n = rounds.empty() ? 0 : static_cast<Eigen::Index>(rounds.front().size());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rounds.size()), n);
  for (std::size_t t = 0; t < rounds.size(); ++t) {
    for (Eigen::Index i = 0; i < n; ++i) out(static_cast<Eigen::Index>(t), i) = rounds[t][i].variance;
  }
  return out;
}

PosteriorSchedule compute_schedule(const NetworkGraph& g, const GaussianSignalStructure& s,
                                   int horizon) {
  if (horizon < 0) throw ValidationError("horizon must be nonnegative");
  PosteriorSchedule sched;
  sched.horizon = horizon;
  sched.rounds.reserve(static_cast<std::size_t>(horizon) + 1);
  auto state = init_moments(g, s);
  for (int t = 0;; ++t) {
    std::vector<GaussianPosterior> row;
    row.reserve(g.size());
    for (int i = 0; i < g.size(); ++i) row.push_back(posterior_params(state, i));
    sched.rounds.push_back(std::move(row));
    if (t == horizon) break;
    state = step_moments(std::move(state), g);
  }
  sched.jitter_events = state.jitter_events();
  return sched;
}

GaussianTrajectory simulate_realization(const NetworkGraph& g, const GaussianSignalStructure& s,
                                        int horizon, std::uint64_t seed, std::uint64_t replica) {
  if (horizon < 1) throw ValidationError("horizon T must be >= 1");
  return simulate_realization(g, s, compute_schedule(g, s, horizon), seed, replica);
}

GaussianTrajectory simulate_realization(const NetworkGraph& g, const GaussianSignalStructure& s,
                                        const PosteriorSchedule& schedule, std::uint64_t seed,
                                        std::uint64_t replica) {
  const int n = g.size();
  const int T = schedule.horizon;
  if (T < 1) throw ValidationError("horizon T must be >= 1");
  if (s.size() != n) throw ValidationError("signal structure does not match graph size");

  GaussianTrajectory tr;
  tr.seed = seed;
  tr.replica = replica;
  StreamKey key{seed, replica, 0, 0, DrawKind::Theta};
  tr.theta = normal_draw(key);
  tr.signals.resize(n);
  key.kind = DrawKind::Signal;
  for (int i = 0; i < n; ++i) {
    key.agent = static_cast<std::uint32_t>(i);
    tr.signals(i) = s.a[i] * tr.theta + normal_draw(key);
  }

  std::vector<Eigen::VectorXd> history(n);
  for (int i = 0; i < n; ++i) {
    history[i] = Eigen::VectorXd::Zero(1 + static_cast<Eigen::Index>(T) * g.degree(i));
    history[i](0) = tr.signals(i);
  }

  tr.messages.resize(T, n);
  tr.post_means.resize(T + 1, n);
  tr.post_vars.resize(T + 1, n);
  key.kind = DrawKind::MessageNoise;
  for (int t = 0; t <= T; ++t) {
    for (int i = 0; i < n; ++i) {
      const auto& post = schedule.at(t, i);
      tr.post_means(t, i) = post.mean(history[i]);
      tr.post_vars(t, i) = post.variance;
    }
    if (t == T) break;
    // Everyone samples from the round-t posterior before any history grows.
    for (int i = 0; i < n; ++i) {
      key.agent = static_cast<std::uint32_t>(i);
      key.round = static_cast<std::uint32_t>(t);
      tr.messages(t, i) = tr.post_means(t, i) + std::sqrt(tr.post_vars(t, i)) * normal_draw(key);
    }
    for (int i = 0; i < n; ++i) {
      const auto nb = g.neighbors(i);
      const Eigen::Index base = 1 + static_cast<Eigen::Index>(t) * g.degree(i);
      for (std::size_t r = 0; r < nb.size(); ++r) {
        history[i](base + static_cast<Eigen::Index>(r)) = tr.messages(t, nb[r]);
      }
    }
  }
  return tr;
}

OraclePosterior bayes_oracle(const GaussianSignalStructure& s, std::span<const double> signals) {
  if (static_cast<int>(signals.size()) != s.size()) {
    throw ValidationError("bayes_oracle: " + std::to_string(signals.size()) + " signals for " +
                          std::to_string(s.size()) + " coefficients");
  }
  double num = 0.0;
  double precision = 1.0;
  for (std::size_t i = 0; i < signals.size(); ++i) {
    num += s.a[i] * signals[i];
    precision += s.a[i] * s.a[i];
  }
  return {num / precision, 1.0 / precision};
}

}  // namespace samplenet::gaussian
