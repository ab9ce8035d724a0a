#pragma once

// Brute-force reference for the two-agent binary example in sampling mode.
//
// Signals are restricted to the midpoint grid g_k = (k + 0.5) / G, with the
// grid cell standing in for the continuous signal. For a transcript prefix tau
// the joint weight of (theta, k1, k2, tau) is
//
//   1/2 * f(g_k1 | theta) * f(g_k2 | theta) * P(tau | k1, k2)
//
// where P(tau | k1, k2) multiplies the Bernoulli probabilities of every
// message given the sender's belief at the time. Beliefs are read off by
// summing the table, so nothing here reuses the engine's closed form. Cost is
// O(4^T * G^2), fine for G <= 7 and T <= 4.

#include <algorithm>
#include <array>
#include <map>
#include <vector>

namespace oracle {

class BinaryJointTable {
 public:
  using Transcript = std::vector<std::array<int, 2>>;

  BinaryJointTable(int grid_size, int horizon, double clamp = 1e-12)
      : grid_size_(grid_size), horizon_(horizon), clamp_(clamp) {
    for (int k = 0; k < grid_size_; ++k) grid_.push_back((k + 0.5) / grid_size_);
    Transcript prefix;
    explore(prefix);
  }

  // Belief of `agent` at signal cell k after `prefix` (prefix.size() rounds).
  double belief(int agent, int k, const Transcript& prefix) const {
    return beliefs_.at(prefix)[agent][k];
  }

  // Probability of the transcript given both signal cells.
  double likelihood(const Transcript& tau, int k1, int k2) const {
    double p = 1.0;
    Transcript prefix;
    for (const auto& y : tau) {
      const auto& b = beliefs_.at(prefix);
      p *= bernoulli(clamped(b[0][k1]), y[0]) * bernoulli(clamped(b[1][k2]), y[1]);
      prefix.push_back(y);
    }
    return p;
  }

  std::vector<Transcript> transcripts(int length) const {
    std::vector<Transcript> out;
    for (const auto& [tau, _] : beliefs_) {
      if (static_cast<int>(tau.size()) == length) out.push_back(tau);
    }
    return out;
  }

  double grid(int k) const { return grid_[k]; }

 private:
  static double density(double x, int theta) { return theta == 1 ? 2.0 * x : 2.0 * (1.0 - x); }
  static double bernoulli(double p, int y) { return y == 1 ? p : 1.0 - p; }
  double clamped(double p) const { return std::clamp(p, clamp_, 1.0 - clamp_); }

  void explore(Transcript& prefix) {
    std::array<std::vector<double>, 2> b;
    for (int agent = 0; agent < 2; ++agent) {
      b[agent].resize(grid_size_);
      for (int k = 0; k < grid_size_; ++k) {
        double num = 0.0;
        double den = 0.0;
        for (int theta = 0; theta <= 1; ++theta) {
          for (int other = 0; other < grid_size_; ++other) {
            const int k1 = agent == 0 ? k : other;
            const int k2 = agent == 0 ? other : k;
            const double w = 0.5 * density(grid_[k1], theta) * density(grid_[k2], theta) *
                             likelihood(prefix, k1, k2);
            den += w;
            if (theta == 1) num += w;
          }
        }
        b[agent][k] = num / den;  // every strict prefix of `prefix` is already in beliefs_
      }
    }
    beliefs_[prefix] = b;
    if (static_cast<int>(prefix.size()) == horizon_) return;
    for (int y1 = 0; y1 <= 1; ++y1) {
      for (int y2 = 0; y2 <= 1; ++y2) {
        prefix.push_back({y1, y2});
        explore(prefix);
        prefix.pop_back();
      }
    }
  }

  int grid_size_;
  int horizon_;
  double clamp_;
  std::vector<double> grid_;
  std::map<Transcript, std::array<std::vector<double>, 2>> beliefs_;
};

}  // namespace oracle
