#pragma once

#include <stdexcept>
#include <string>

namespace samplenet {

/// Bad input: malformed topology, config field out of range, non-adjacent agents.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A covariance block became too ill-conditioned to factor reliably.
class NumericalDegeneracy : public std::runtime_error {
 public:
  NumericalDegeneracy(int agent, int round, const std::string& what)
      : std::runtime_error("agent " + std::to_string(agent) + ", round " +
                           std::to_string(round) + ": " + what),
        agent_(agent),
        round_(round) {}

  int agent() const { return agent_; }
  int round() const { return round_; }

 private:
  int agent_;
  int round_;
};

/// An action-mode transcript that no opponent signal could have produced.
class InconsistentTranscript : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 0/0 posterior, e.g. signals that rule out both states.
class UndefinedPosterior : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Missing input file or unwritable output location.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Engine failure inside a Monte-Carlo run, tagged with the replica index.
class ReplicaError : public std::runtime_error {
 public:
  ReplicaError(long replica, const std::string& what, bool numerical)
      : std::runtime_error("replica " + std::to_string(replica) + ": " + what),
        replica_(replica),
        numerical_(numerical) {}

  long replica() const { return replica_; }
  bool numerical() const { return numerical_; }

 private:
  long replica_;
  bool numerical_;
};

}  // namespace samplenet
