#ifndef TREEMC_CONFIG_HPP
#define TREEMC_CONFIG_HPP

#include <memory>
#include <string>
#include <vector>

#include "treemc/analysis.hpp"
#include "treemc/bn_space.hpp"
#include "treemc/scoring.hpp"

namespace treemc {

// A parsed prior/constraints configuration: the model space, its edge
// probabilities, hard constraints, and Dirichlet hyperparameters. See the
// README for the exact keys.
struct PriorSpec {
  enum class ProgramKind { Pairwise, Ordered };

  VariableSet vars;
  std::vector<std::vector<std::string>> labels;  // per variable; empty = unlabeled
  ProgramKind kind = ProgramKind::Pairwise;
  EdgeParams params;
  Constraints constraints;
  DirichletSpec alpha;

  std::shared_ptr<const ChoiceProgram> build() const;
  // Depth of the probability tree (the pair count), used by the cyclic kernel.
  std::size_t tree_depth() const;
};

PriorSpec load_prior_spec(const std::string& path);

// Network fixture files for data generation.
CptBn load_bn_spec(const std::string& path);

// Comma-separated dataset: first line variable names, then one row of
// category labels per record. When `prior` is given its variable set fixes
// the column set and, for label-declared variables, the label -> index
// mapping; otherwise labels map to indices in first-appearance order.
Dataset load_dataset_csv(const std::string& path, const PriorSpec* prior = nullptr);
void write_dataset_csv(const std::string& path, const Dataset& data);

// Deterministic double formatting (17 significant digits) shared by all file
// writers, so reruns are byte-identical.
std::string format_double(double v);

}  // namespace treemc

#endif
