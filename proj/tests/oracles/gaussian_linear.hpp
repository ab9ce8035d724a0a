#pragma once

// Brute-force reference for the Gaussian network model.
//
// Every random quantity is carried as an explicit linear combination of the
// primitive independent variables theta, eps_1..eps_n and Z_i(t). Posteriors
// are computed from the unconditional joint law of (theta, H) with a full
// pivoting LU solve, which shares no code path with the engine's
// information-form recursion. Only suitable for tiny graphs and horizons.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "samplenet/network.hpp"

namespace oracle {

struct LinearPosterior {
  double variance = 1.0;
  Eigen::VectorXd weights;
};

class GaussianLinearModel {
 public:
  GaussianLinearModel(const samplenet::NetworkGraph& g, std::vector<double> a, int horizon)
      : g_(g), a_(std::move(a)), horizon_(horizon) {
    const int n = g_.size();
    dim_ = 1 + n + n * horizon_;
    history_.resize(n);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd s = Eigen::VectorXd::Zero(dim_);
      s(0) = a_[i];
      s(1 + i) = 1.0;
      history_[i].push_back(s);
    }
    for (int t = 0; t < horizon_; ++t) advance(t);
  }

  int agents() const { return g_.size(); }

  // Coefficient rows of H_i(t): own signal plus neighbor messages sent before t.
  Eigen::MatrixXd history(int i, int t) const {
    const int rows = 1 + t * g_.degree(i);
    Eigen::MatrixXd h(rows, dim_);
    for (int r = 0; r < rows; ++r) h.row(r) = history_[i][r].transpose();
    return h;
  }

  // E[H_i(t) | theta] = theta * mu.
  Eigen::VectorXd mu(int i, int t) const { return history(i, t).col(0); }

  // Cov(H_i(t), H_j(t) | theta).
  Eigen::MatrixXd sigma(int i, int j, int t) const {
    const auto hi = history(i, t);
    const auto hj = history(j, t);
    const int noise = dim_ - 1;
    return hi.rightCols(noise) * hj.rightCols(noise).transpose();
  }

  LinearPosterior posterior(int i, int t) const {
    const auto h = history(i, t);
    // Unconditional: Var(H) = H H^T (all primitives unit variance), Cov(theta, H) = H e_0.
    const Eigen::MatrixXd var = h * h.transpose();
    const Eigen::VectorXd cov = h.col(0);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(var);
    LinearPosterior p;
    p.weights = lu.solve(cov);
    p.variance = 1.0 - cov.dot(p.weights);
    return p;
  }

  // Primitive-coordinate map for plugging in realized draws.
  int theta_index() const { return 0; }
  int signal_noise_index(int i) const { return 1 + i; }
  int message_noise_index(int i, int t) const { return 1 + g_.size() + t * g_.size() + i; }

 private:
  void advance(int t) {
    const int n = g_.size();
    std::vector<Eigen::VectorXd> messages(n);
    for (int i = 0; i < n; ++i) {
      const auto p = posterior(i, t);
      const auto h = history(i, t);
      Eigen::VectorXd y = h.transpose() * p.weights;
      y(message_noise_index(i, t)) += std::sqrt(p.variance);
      messages[i] = y;
    }
    for (int i = 0; i < n; ++i) {
      for (int j : g_.neighbors(i)) history_[i].push_back(messages[j]);
    }
  }

  samplenet::NetworkGraph g_;
  std::vector<double> a_;
  int horizon_;
  int dim_;
  std::vector<std::vector<Eigen::VectorXd>> history_;
};

}  // namespace oracle
