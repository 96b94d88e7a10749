#ifndef TREEMC_CHAIN_HPP
#define TREEMC_CHAIN_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "treemc/tree.hpp"

namespace treemc {

// A candidate move: the proposed derivation plus everything the acceptance
// ratio needs about the path between the two leaves.
struct Proposal {
  Derivation candidate;
  std::size_t common_depth = 0;  // depth of the deepest common ancestor
  std::size_t n_current = 0;     // depth of the current leaf
  std::size_t n_candidate = 0;   // depth of the candidate leaf
  double p_current = 0.0;        // prob of the branch from the common ancestor toward the current leaf (the blocked one)
  double p_candidate = 0.0;      // prob of the branch taken toward the candidate
  bool failed = false;           // candidate ended at a failure leaf
};

// Generates a candidate leaf from `current`:
//  1. backtrack one step unconditionally,
//  2. keep backtracking, each step with probability backtrack_prob (stopping
//     is forced at the root),
//  3. descend choosing branches by their prior probabilities, with the branch
//     just backtracked out of blocked for the first downward step only (the
//     rest renormalized).
// If the stop node has no positive unblocked branch, one further backtrack
// step is forced and the descent retried; at the root this throws
// NoUnblockedBranch.
Proposal propose(const ChoiceProgram& program, const Derivation& current,
                 double backtrack_prob, Rng& rng);

// Fields of the unique one-step proposal from `from` to `to`, derived without
// sampling. Throws SameLeaf when the derivations coincide.
Proposal proposal_between(const Derivation& from, const Derivation& to);

// Log probability that one propose() step at `from` yields `to`. Three
// factors: a backtrack factor (the (1 - p_b) stop term is dropped when the
// common ancestor is the root, where stopping is forced), the product of
// prior branch probabilities from the common ancestor down to `to`, and the
// blocked-branch renormalization 1/(1 - p_current). Assumes positive branch
// probabilities along the two paths.
double proposal_prob_log(const Derivation& from, const Derivation& to, double backtrack_prob);

// log alpha = min{0, (n* - n) log p_b + log(1 - p_current) - log(1 - p_candidate)
//                  + loglik_candidate - loglik_current};
// -infinity for failed proposals.
double acceptance_log(const Proposal& prop, double loglik_current, double loglik_candidate,
                      double backtrack_prob);

// Cyclic backtrack-probability schedule: 1 - 2^-n with n cycling 1..depth,
// advancing once per iteration (iterations are 1-based).
double pb_schedule(std::uint64_t iteration, std::size_t depth);

struct Kernel {
  enum class Type { Fixed, Cyclic };
  Type type = Type::Cyclic;
  double fixed_pb = 0.5;        // Fixed only, in (0,1)
  std::size_t cycle_depth = 1;  // Cyclic only

  double pb_at(std::uint64_t iteration) const;
  void validate() const;
};

struct ChainConfig {
  std::uint64_t iterations = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t seed = 0;
  Kernel kernel;
  std::uint64_t record_every = 1;  // thinning stride

  void validate() const;
};

struct ChainState {
  Derivation derivation;  // always a successful leaf
  double loglik = 0.0;
  std::uint64_t iteration = 0;
  std::uint64_t accepted_count = 0;
};

// Log marginal likelihood of a yielded model.
using Scorer = std::function<double(const ModelRef&)>;

// One Metropolis-Hastings transition. Failed proposals are rejected without
// scoring and without an acceptance draw; every non-failure proposal consumes
// exactly one uniform draw, even when alpha is 1.
ChainState mh_step(const ChainState& state, const ChoiceProgram& program, const Scorer& scorer,
                   double backtrack_prob, Rng& rng);

struct TraceRecord {
  std::uint64_t iteration = 0;
  std::string model;  // canonical key
  double loglik = 0.0;
  bool accepted = false;
};

// Persisted chain output. Only models are recorded, never derivations.
struct Trace {
  std::vector<TraceRecord> records;
};

// Runs a chain from a prior-sampled initial state. All randomness flows from
// config.seed; identical configs produce identical traces. Records every
// record_every-th post-burn-in state.
Trace run_chain(const ChoiceProgram& program, const Scorer& scorer, const ChainConfig& config);

// Runs independent chains, one per config, in parallel when OpenMP is
// enabled. Each chain gets its own scorer from the factory so caches are
// never shared unless the factory chooses to share a thread-safe one. Traces
// are identical to running the chains one at a time.
std::vector<Trace> run_chains(const ChoiceProgram& program,
                              const std::function<Scorer()>& scorer_factory,
                              std::span<const ChainConfig> configs);

// Tab-separated trace file: header "iteration<TAB>model<TAB>loglik<TAB>accepted",
// one record per line, loglik printed with 17 significant digits, accepted as
// 0/1. The format is stable.
void write_trace(const std::string& path, const Trace& trace);
Trace read_trace(const std::string& path);

}  // namespace treemc

#endif
