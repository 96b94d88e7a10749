#include "treemc/explicit_tree.hpp"

#include <cmath>

namespace treemc {

class ExplicitTreeCursor final : public TreeCursor {
 public:
  explicit ExplicitTreeCursor(const ExplicitTree& tree) : tree_(&tree) { stack_.push_back(0); }

  const Node& node() const override {
    return tree_->nodes_[static_cast<std::size_t>(stack_.back())].expansion;
  }

  void descend(int branch) override {
    const auto& stored = tree_->nodes_[static_cast<std::size_t>(stack_.back())];
    stack_.push_back(stored.children[static_cast<std::size_t>(branch)]);
  }

  void truncate(std::size_t depth) override { stack_.resize(depth + 1); }

  std::size_t depth() const override { return stack_.size() - 1; }

 private:
  const ExplicitTree* tree_;
  std::vector<int> stack_;
};

int ExplicitTree::add_choice(std::vector<double> probs) {
  StoredNode n;
  n.children.assign(probs.size(), -1);
  n.expansion = Node::choice(std::move(probs));
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int ExplicitTree::add_success(std::string key, std::any payload) {
  StoredNode n;
  n.expansion = Node::success(ModelRef{std::move(key), std::move(payload)});
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int ExplicitTree::add_failure() {
  StoredNode n;
  n.expansion = Node::failure();
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

void ExplicitTree::link(int parent, int branch, int child) {
  nodes_[static_cast<std::size_t>(parent)].children[static_cast<std::size_t>(branch)] = child;
}

void ExplicitTree::validate() const {
  std::vector<int> seen(nodes_.size(), 0);
  for (const auto& stored : nodes_) {
    if (stored.expansion.kind == NodeKind::Choice) {
      double sum = 0.0;
      for (double p : stored.expansion.probs) {
        if (p < 0.0) throw ValidationError("explicit tree: negative branch probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        throw ValidationError("explicit tree: branch probabilities sum to " + std::to_string(sum));
      }
      for (int c : stored.children) {
        if (c < 0 || static_cast<std::size_t>(c) >= nodes_.size()) {
          throw ValidationError("explicit tree: unlinked or dangling branch");
        }
        seen[static_cast<std::size_t>(c)] += 1;
      }
    }
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (seen[i] != 1) throw ValidationError("explicit tree: node linked " + std::to_string(seen[i]) + " times; not a tree");
  }
}

std::unique_ptr<TreeCursor> ExplicitTree::cursor() const {
  return std::make_unique<ExplicitTreeCursor>(*this);
}

}  // namespace treemc
