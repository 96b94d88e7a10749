#ifndef TREEMC_SCORING_HPP
#define TREEMC_SCORING_HPP

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "treemc/bn_space.hpp"

namespace treemc {

// Complete discrete data: N rows of category indices, one per variable,
// stored row-major. `labels` keeps the value names for CSV round-trips.
struct Dataset {
  VariableSet vars;
  std::vector<std::uint8_t> values;
  std::size_t n_rows = 0;
  std::vector<std::vector<std::string>> labels;  // per variable; may be empty

  std::uint8_t at(std::size_t row, int var) const {
    return values[row * vars.size() + static_cast<std::size_t>(var)];
  }
  void validate() const;
};

// Sufficient statistics for one family: counts per (parent instantiation,
// child value). Parent instantiations are indexed mixed-radix over the sorted
// parent list, last parent varying fastest.
struct CountTable {
  int child = -1;
  std::vector<int> parents;  // sorted ascending by variable index
  int child_domain = 0;
  std::size_t q = 1;  // number of parent instantiations
  std::vector<std::int64_t> counts;  // q * child_domain, instantiation-major

  std::int64_t n_ijk(std::size_t j, int k) const {
    return counts[j * static_cast<std::size_t>(child_domain) + static_cast<std::size_t>(k)];
  }
  std::int64_t n_ij(std::size_t j) const;
  std::int64_t total() const;
};

// Symmetric Dirichlet hyperparameters: one alpha per cell, optionally
// overridden per variable.
struct DirichletSpec {
  double default_alpha = 1.0;
  std::map<std::string, double> per_variable;

  double alpha_for(const VariableSet& vars, int var) const;
  void validate() const;
};

// Map from (child, parent set) to log family score. Optionally thread safe:
// concurrent reads plus idempotent inserts (the same key always maps to the
// same value). Entry cap rejects inserts once full; cached entries stay.
class ScoreCache {
 public:
  ScoreCache() = default;
  explicit ScoreCache(std::size_t max_entries, bool thread_safe = false)
      : max_entries_(max_entries), thread_safe_(thread_safe) {}

  std::optional<double> find(int child, std::uint64_t parent_mask) const;
  void insert(int child, std::uint64_t parent_mask, double value);

  std::size_t size() const;
  std::uint64_t hits() const { return hits_.load(std::memory_order_relaxed); }
  std::uint64_t misses() const { return misses_.load(std::memory_order_relaxed); }

 private:
  struct KeyHash {
    std::size_t operator()(const std::pair<std::uint64_t, int>& k) const {
      return std::hash<std::uint64_t>()(k.first * 0x9e3779b97f4a7c15ULL +
                                        static_cast<std::uint64_t>(k.second));
    }
  };
  std::unordered_map<std::pair<std::uint64_t, int>, double, KeyHash> map_;
  std::size_t max_entries_ = static_cast<std::size_t>(-1);
  bool thread_safe_ = false;
  mutable std::shared_mutex mutex_;
  mutable std::atomic<std::uint64_t> hits_{0};
  mutable std::atomic<std::uint64_t> misses_{0};
};

// Exact counts over all rows. The parallel entry point partitions rows across
// threads when OpenMP is enabled and the dataset is large; results are
// identical to the serial reference (integer merges).
CountTable tabulate_counts(const Dataset& data, int child, std::span<const int> parents);
CountTable tabulate_counts_serial(const Dataset& data, int child, std::span<const int> parents);

// Dirichlet-multinomial marginal log-likelihood of one family:
//   sum_j [ lgamma(a_j) - lgamma(a_j + N_j) + sum_k lgamma(a_jk + N_jk) - lgamma(a_jk) ]
// with symmetric per-cell alpha. Zero-count instantiations contribute 0.
double family_score_log(const CountTable& counts, double alpha);

// Decomposable model log-likelihood: sum of family scores, using and
// populating the cache when one is given.
double model_loglik(const Dag& dag, const Dataset& data, const DirichletSpec& alpha,
                    ScoreCache* cache = nullptr);

// Log Bayes factor of dag_star against dag_i. Families with identical parent
// sets contribute exactly zero without being evaluated.
double delta_loglik(const Dag& dag_i, const Dag& dag_star, const Dataset& data,
                    const DirichletSpec& alpha, ScoreCache* cache = nullptr);

// Scorer for chains over DAG spaces: unwraps the model payload and computes
// the cached model log-likelihood.
class BnScorer {
 public:
  BnScorer(const Dataset& data, DirichletSpec alpha, ScoreCache* cache)
      : data_(&data), alpha_(std::move(alpha)), cache_(cache) {}

  double operator()(const ModelRef& model) const;

 private:
  const Dataset* data_;
  DirichletSpec alpha_;
  ScoreCache* cache_;
};

}  // namespace treemc

#endif
