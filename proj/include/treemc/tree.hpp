#ifndef TREEMC_TREE_HPP
#define TREEMC_TREE_HPP

#include <any>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "treemc/errors.hpp"
#include "treemc/random.hpp"

namespace treemc {

// A model yielded at a successful leaf: a canonical string key that defines
// model identity (marginalization, traces) plus an opaque payload the owning
// model space understands (e.g. a Dag).
struct ModelRef {
  std::string key;
  std::any value;
};

enum class NodeKind { Choice, Success, Failure };

// Expansion of one tree node.
struct Node {
  NodeKind kind = NodeKind::Failure;
  std::vector<double> probs;  // Choice only: branch probabilities, >= 0, sum 1
  ModelRef model;             // Success only

  static Node choice(std::vector<double> p) {
    Node n;
    n.kind = NodeKind::Choice;
    n.probs = std::move(p);
    return n;
  }
  static Node success(ModelRef m) {
    Node n;
    n.kind = NodeKind::Success;
    n.model = std::move(m);
    return n;
  }
  static Node failure() { return Node{}; }
};

// Mutable walk state over an implicit probability tree. Cursors are cheap,
// single-threaded values; the program they walk is immutable and may be
// shared across threads.
class TreeCursor {
 public:
  virtual ~TreeCursor() = default;

  // Expansion of the node reached by the choices taken so far.
  virtual const Node& node() const = 0;

  // Takes one branch of the current choice point. Precondition: the current
  // node is a Choice and `branch` indexes one of its branches.
  virtual void descend(int branch) = 0;

  // Backtracks to the given depth (number of choices taken from the root).
  virtual void truncate(std::size_t depth) = 0;

  virtual std::size_t depth() const = 0;
};

// A probability tree given implicitly as a replayable generator of choice
// points. Expansion is deterministic: a path always reaches the same node,
// so the tree itself is fixed and only traversal is stochastic.
class ChoiceProgram {
 public:
  virtual ~ChoiceProgram() = default;
  virtual std::unique_ptr<TreeCursor> cursor() const = 0;
};

enum class Terminal { Partial, Success, Failure };

// One root-to-node path: branch indices plus the probability recorded at every
// choice point along the way. Models are never stored in the tree; a
// derivation is enough to rebuild everything by replay.
struct Derivation {
  std::vector<std::int32_t> choices;
  std::vector<double> branch_probs;
  Terminal terminal = Terminal::Partial;
  ModelRef model;  // set iff terminal == Success

  std::size_t depth() const { return choices.size(); }
  bool is_leaf() const { return terminal != Terminal::Partial; }
};

struct EnumerateLimits {
  std::size_t max_leaves = 10'000'000;
  std::size_t max_depth = 10'000;
};

struct SampleOptions {
  std::uint64_t max_retries = 1'000'000;
  std::size_t max_depth = 10'000;
};

// Exhaustive view of a finite tree: every positive-probability leaf, the
// success mass z, and the induced distribution over models.
struct TreeSummary {
  struct Leaf {
    Derivation derivation;
    double psi;  // product of branch probabilities along the path
  };
  std::vector<Leaf> leaves;  // successful and failure leaves
  double z = 0.0;            // total mass on successful leaves
  std::map<std::string, double> model_prior;

  std::size_t success_count() const;
  std::size_t failure_count() const;
};

// Walks `choices` from the root, recording branch probabilities and the
// terminal status of the reached node.
//
// Throws IndexOutOfRange if an index exceeds the branch count at any step and
// ExtendPastLeaf if choices continue after a Success/Failure node.
Derivation replay(const ChoiceProgram& program, std::span<const std::int32_t> choices);

// Log of the product of recorded branch probabilities. A zero probability
// yields the -infinity sentinel. The empty product is 0.
double psi_log(const Derivation& d);

// Rejection-samples a successful derivation: walk root to leaf choosing
// branches by their probabilities, discard failure leaves, return the first
// success. The returned derivations are distributed by the success-conditioned
// path distribution.
Derivation sample_prior(const ChoiceProgram& program, Rng& rng, const SampleOptions& opts = {});

// Depth-first traversal of every positive-probability path. Zero-probability
// branches are skipped; they carry no mass.
TreeSummary enumerate_tree(const ChoiceProgram& program, const EnumerateLimits& limits = {});

}  // namespace treemc

#endif
