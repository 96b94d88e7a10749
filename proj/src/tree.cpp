#include "treemc/tree.hpp"

#include <cmath>
#include <limits>

namespace treemc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

std::size_t TreeSummary::success_count() const {
  std::size_t n = 0;
  for (const auto& leaf : leaves) n += leaf.derivation.terminal == Terminal::Success;
  return n;
}

std::size_t TreeSummary::failure_count() const {
  std::size_t n = 0;
  for (const auto& leaf : leaves) n += leaf.derivation.terminal == Terminal::Failure;
  return n;
}

Derivation replay(const ChoiceProgram& program, std::span<const std::int32_t> choices) {
  auto cur = program.cursor();
  Derivation d;
  d.choices.reserve(choices.size());
  d.branch_probs.reserve(choices.size());
  for (std::int32_t c : choices) {
    const Node& node = cur->node();
    if (node.kind != NodeKind::Choice) {
      throw ExtendPastLeaf("replay: choices continue past a terminal node at depth " +
                           std::to_string(d.choices.size()));
    }
    if (c < 0 || static_cast<std::size_t>(c) >= node.probs.size()) {
      throw IndexOutOfRange("replay: branch " + std::to_string(c) + " out of range at depth " +
                            std::to_string(d.choices.size()) + " (" +
                            std::to_string(node.probs.size()) + " branches)");
    }
    d.choices.push_back(c);
    d.branch_probs.push_back(node.probs[static_cast<std::size_t>(c)]);
    cur->descend(c);
  }
  const Node& end = cur->node();
  switch (end.kind) {
    case NodeKind::Choice:
      d.terminal = Terminal::Partial;
      break;
    case NodeKind::Success:
      d.terminal = Terminal::Success;
      d.model = end.model;
      break;
    case NodeKind::Failure:
      d.terminal = Terminal::Failure;
      break;
  }
  return d;
}

double psi_log(const Derivation& d) {
  double sum = 0.0;
  for (double p : d.branch_probs) {
    if (p <= 0.0) return kNegInf;
    sum += std::log(p);
  }
  return sum;
}

Derivation sample_prior(const ChoiceProgram& program, Rng& rng, const SampleOptions& opts) {
  auto cur = program.cursor();
  for (std::uint64_t attempt = 0; attempt < opts.max_retries; ++attempt) {
    cur->truncate(0);
    Derivation d;
    for (;;) {
      const Node& node = cur->node();
      if (node.kind == NodeKind::Success) {
        d.terminal = Terminal::Success;
        d.model = node.model;
        return d;
      }
      if (node.kind == NodeKind::Failure) break;  // rejected attempt
      if (d.choices.size() >= opts.max_depth) {
        throw NonterminatingTree("sample_prior: depth bound " + std::to_string(opts.max_depth) +
                                 " exceeded");
      }
      int branch = sample_weighted(node.probs, rng);
      d.choices.push_back(branch);
      d.branch_probs.push_back(node.probs[static_cast<std::size_t>(branch)]);
      cur->descend(branch);
    }
  }
  throw MaxRetriesExceeded("sample_prior: no successful derivation in " +
                           std::to_string(opts.max_retries) +
                           " attempts (success mass may be zero)");
}

TreeSummary enumerate_tree(const ChoiceProgram& program, const EnumerateLimits& limits) {
  TreeSummary summary;
  auto cur = program.cursor();

  // Iterative DFS over positive-probability branches. The path holds the
  // next branch to try at every level.
  Derivation path;
  std::vector<double> log_prefix{0.0};  // log psi of each prefix

  auto first_positive = [](const std::vector<double>& probs, int from) {
    for (std::size_t i = static_cast<std::size_t>(from); i < probs.size(); ++i) {
      if (probs[i] > 0.0) return static_cast<int>(i);
    }
    return -1;
  };

  int next_branch = 0;
  for (;;) {
    const Node& node = cur->node();
    bool at_leaf = node.kind != NodeKind::Choice;

    if (!at_leaf && path.choices.size() >= limits.max_depth) {
      throw LimitExceeded("enumerate: depth limit " + std::to_string(limits.max_depth) +
                          " exceeded");
    }

    int branch = at_leaf ? -1 : first_positive(node.probs, next_branch);
    if (!at_leaf && branch >= 0) {
      path.choices.push_back(branch);
      path.branch_probs.push_back(node.probs[static_cast<std::size_t>(branch)]);
      log_prefix.push_back(log_prefix.back() + std::log(node.probs[static_cast<std::size_t>(branch)]));
      cur->descend(branch);
      next_branch = 0;
      continue;
    }

    if (at_leaf) {
      if (summary.leaves.size() >= limits.max_leaves) {
        throw LimitExceeded("enumerate: leaf limit " + std::to_string(limits.max_leaves) +
                            " exceeded");
      }
      Derivation leaf = path;
      double psi = std::exp(log_prefix.back());
      if (node.kind == NodeKind::Success) {
        leaf.terminal = Terminal::Success;
        leaf.model = node.model;
        summary.z += psi;
      } else {
        leaf.terminal = Terminal::Failure;
      }
      summary.leaves.push_back({std::move(leaf), psi});
    }

    // Backtrack to the deepest level with an untried positive branch.
    for (;;) {
      if (path.choices.empty()) {
        // Done. Normalize model masses by z.
        std::map<std::string, double> prior;
        for (const auto& l : summary.leaves) {
          if (l.derivation.terminal == Terminal::Success) {
            prior[l.derivation.model.key] += l.psi / summary.z;
          }
        }
        summary.model_prior = std::move(prior);
        return summary;
      }
      int tried = path.choices.back();
      path.choices.pop_back();
      path.branch_probs.pop_back();
      log_prefix.pop_back();
      cur->truncate(path.choices.size());
      const Node& up = cur->node();
      int next = first_positive(up.probs, tried + 1);
      if (next >= 0) {
        next_branch = next;
        break;
      }
    }
  }
}

}  // namespace treemc
