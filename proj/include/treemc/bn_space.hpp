#ifndef TREEMC_BN_SPACE_HPP
#define TREEMC_BN_SPACE_HPP

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "treemc/tree.hpp"

namespace treemc {

// Ordered list of named discrete variables. The order is fixed for the life
// of a run; it defines the pair schedule and the canonical model form.
struct VariableSet {
  std::vector<std::string> names;
  std::vector<int> domains;  // category counts, each >= 2

  std::size_t size() const { return names.size(); }
  int index_of(const std::string& name) const;  // -1 if absent
  void validate() const;
};

// A Bayesian-network structure: per-variable parent sets plus the transitive
// closure of the parent relation, both as bitmasks. The closure makes cycle
// checks a single mask test. At most 64 variables.
struct Dag {
  std::vector<std::uint64_t> parents;
  std::vector<std::uint64_t> ancestors;

  Dag() = default;
  explicit Dag(std::size_t n) : parents(n, 0), ancestors(n, 0) {}

  std::size_t size() const { return parents.size(); }
  bool has_edge(int from, int to) const {
    return (parents[static_cast<std::size_t>(to)] >> from) & 1u;
  }
  int parent_count(int v) const;
  std::size_t edge_count() const;
};

// Adds from->to and updates the ancestor closure of `to` and everything
// downstream of it. Returns nullopt iff the edge would close a directed
// cycle (i.e. `to` is already an ancestor of `from`); a cycle is a value
// outcome, not a fault.
std::optional<Dag> try_add_edge(const Dag& dag, int from, int to);

// Recomputes the ancestor closure from the parent sets alone.
std::vector<std::uint64_t> transitive_closure(const std::vector<std::uint64_t>& parents);

// Canonical model identity: families listed in variable order, parents sorted
// by variable index, e.g. "B<-L;L<-;S<-B,L".
std::string canonical_key(const Dag& dag, const VariableSet& vars);

// Per ordered pair (X, Y) of the pair schedule: probability that Y is chosen
// to be a parent of X, that Y is a child of X, and that the pair is left
// unconnected.
struct EdgeParams {
  std::array<double, 3> base{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  // Overrides keyed by (x, y) variable indices with x < y.
  std::map<std::pair<int, int>, std::array<double, 3>> per_pair;

  const std::array<double, 3>& for_pair(int x, int y) const;
  void validate(const VariableSet& vars) const;
};

// Hard structural constraints. All sets use variable indices.
struct Constraints {
  std::optional<std::vector<int>> ordering;       // total order over all variables
  std::optional<int> max_parents;
  std::map<int, std::uint64_t> forced_parents;    // exact parent set per variable
  std::set<std::pair<int, int>> forbidden_edges;  // (parent, child)
  std::set<std::pair<int, int>> required_edges;   // (parent, child)

  bool empty() const;
  // Static consistency: required vs forbidden disjoint, forced sets respect
  // max_parents and ordering, required edges respect ordering, and so on.
  void validate(const VariableSet& vars) const;
};

// Pair schedule: each new variable is connected against the previous ones,
// most recent first. For 3 variables: (0,1), (1,2), (0,2).
std::vector<std::pair<int, int>> pair_schedule(std::size_t n);

// A program whose choice points visit variable pairs in schedule order and
// offer the three edge outcomes with the pair's probabilities. A choice that
// closes a directed cycle or violates a constraint yields Failure at that
// point; a complete assignment yields Success(Dag). Depth = C(n,2).
std::shared_ptr<const ChoiceProgram> build_pairwise_program(const VariableSet& vars,
                                                            const EdgeParams& params,
                                                            const Constraints& constraints);

// A failure-free program: at each pair only the order-consistent outcomes are
// offered (edge from the earlier variable or no edge), renormalized from the
// pair's probabilities; constraint-excluded outcomes are pruned and the rest
// renormalized, with parent budget reserved for edges that later pairs must
// add. Every leaf is a Success.
std::shared_ptr<const ChoiceProgram> build_ordered_program(const VariableSet& vars,
                                                           const std::vector<int>& order,
                                                           const EdgeParams& params,
                                                           const Constraints& constraints);

// Number of labeled DAGs on n nodes via the inclusion-exclusion recurrence
// a(n) = sum_{k=1..n} (-1)^(k+1) C(n,k) 2^(k(n-k)) a(n-k). Throws Overflow
// when the count does not fit in 64 bits (n > 10).
std::uint64_t count_dags(int n);

}  // namespace treemc

#endif
