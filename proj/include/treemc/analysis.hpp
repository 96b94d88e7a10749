#ifndef TREEMC_ANALYSIS_HPP
#define TREEMC_ANALYSIS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "treemc/chain.hpp"
#include "treemc/scoring.hpp"

namespace treemc {

// A fully parameterized discrete Bayesian network: structure plus one
// conditional probability table per family. CPT rows are indexed mixed-radix
// over the sorted parent list (last parent fastest), values within a row in
// domain order.
struct CptBn {
  VariableSet vars;
  std::vector<std::vector<std::string>> labels;  // per-variable value names
  Dag dag;
  std::vector<std::vector<double>> cpt;  // per variable, q * domain row-major

  void validate() const;  // shapes match, every row sums to 1 within 1e-9
  std::vector<int> topo_order() const;
};

// Ancestral simulation: n rows, each variable drawn from its CPT row given
// its already-sampled parents.
Dataset forward_sample(const CptBn& bn, std::size_t n, Rng& rng);

struct PosteriorRow {
  std::string model;
  double prior = 0.0;      // p(M) from the tree
  double loglik = 0.0;     // log P(D|M)
  double posterior = 0.0;  // normalized over the enumerated space
};

// Exact posterior over an enumerable model space, sorted by posterior
// descending (ties by model key).
struct PosteriorTable {
  std::vector<PosteriorRow> rows;
  double posterior_of(const std::string& key) const;  // 0 if absent
};

PosteriorTable exact_posterior(const ChoiceProgram& program, const Dataset& data,
                               const DirichletSpec& alpha, const EnumerateLimits& limits = {});

// Canonical model key parsed back into names and parent index lists.
struct ParsedModel {
  std::vector<std::string> names;
  std::vector<std::vector<int>> parents;
};
ParsedModel parse_canonical(const std::string& key);

// Estimated posterior probability of every ordered (parent, child) pair,
// computed over the retained samples of a trace.
struct MarginalReport {
  std::vector<std::string> names;  // variable order (from the trace models)
  std::map<std::pair<int, int>, double> values;
  std::uint64_t sample_count = 0;
};

// Fraction of trace samples whose model contains each directed edge. The
// parallel entry point splits the counting pass across threads when OpenMP is
// enabled; both produce identical reports.
MarginalReport edge_marginals(const Trace& trace);
MarginalReport edge_marginals_serial(const Trace& trace);

struct ComparedFeature {
  std::string parent;
  std::string child;
  double a = 0.0;
  double b = 0.0;
};

struct Comparison {
  std::vector<ComparedFeature> features;
  double max_abs_diff = 0.0;
};

// Pairs up two reports feature by feature. Throws FeatureMismatch when the
// variable sets differ.
Comparison compare_runs(const MarginalReport& a, const MarginalReport& b);

// Edges whose estimated probability strictly exceeds the threshold.
std::vector<std::pair<int, int>> recover_graph(const MarginalReport& report, double threshold);

// Tab-separated report files.
void write_marginals(const std::string& path, const MarginalReport& report);
MarginalReport read_marginals(const std::string& path);
void write_comparison(const std::string& path, const Comparison& cmp);

// Graphviz DOT output for a recovered edge set.
void write_dot(const std::string& path, const MarginalReport& report,
               const std::vector<std::pair<int, int>>& edges);

}  // namespace treemc

#endif
