#ifndef TREEMC_EXPLICIT_TREE_HPP
#define TREEMC_EXPLICIT_TREE_HPP

#include <vector>

#include "treemc/tree.hpp"

namespace treemc {

// A probability tree held explicitly in memory. Useful for small model
// spaces and for building test trees of arbitrary shape.
class ExplicitTree : public ChoiceProgram {
 public:
  // Nodes are created detached and wired up with link(); node 0, created
  // first, is the root.
  int add_choice(std::vector<double> probs);
  int add_success(std::string key, std::any payload = {});
  int add_failure();

  // Makes `child` the target of `parent`'s branch `branch`.
  void link(int parent, int branch, int child);

  // Checks that every branch has a child, probabilities are nonnegative and
  // sum to 1 within 1e-12, and each node is linked at most once (tree shape).
  void validate() const;

  std::unique_ptr<TreeCursor> cursor() const override;

 private:
  struct StoredNode {
    Node expansion;
    std::vector<int> children;  // parallel to expansion.probs; -1 = unset
  };
  std::vector<StoredNode> nodes_;

  friend class ExplicitTreeCursor;
};

}  // namespace treemc

#endif
