#include "treemc/bn_space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

namespace treemc {

int VariableSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

void VariableSet::validate() const {
  if (names.size() != domains.size()) {
    throw ValidationError("variable set: names and domains differ in length");
  }
  if (names.empty()) throw ValidationError("variable set: empty");
  if (names.size() > 64) throw ValidationError("variable set: at most 64 variables supported");
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i].empty()) throw ValidationError("variable set: empty name");
    if (domains[i] < 2) {
      throw ValidationError("variable " + names[i] + ": domain size must be >= 2");
    }
    for (std::size_t j = i + 1; j < names.size(); ++j) {
      if (names[i] == names[j]) throw ValidationError("duplicate variable name " + names[i]);
    }
  }
}

int Dag::parent_count(int v) const {
  return std::popcount(parents[static_cast<std::size_t>(v)]);
}

std::size_t Dag::edge_count() const {
  std::size_t n = 0;
  for (auto m : parents) n += static_cast<std::size_t>(std::popcount(m));
  return n;
}

std::optional<Dag> try_add_edge(const Dag& dag, int from, int to) {
  if (from == to) throw ValidationError("try_add_edge: self edge");
  const auto uf = static_cast<std::size_t>(from);
  const auto ut = static_cast<std::size_t>(to);
  if ((dag.ancestors[uf] >> to) & 1u) return std::nullopt;  // would close a cycle
  Dag out = dag;
  const std::uint64_t from_bit = 1ull << from;
  const std::uint64_t to_bit = 1ull << to;
  out.parents[ut] |= from_bit;
  const std::uint64_t gained = dag.ancestors[uf] | from_bit;
  for (std::size_t v = 0; v < out.size(); ++v) {
    if (v == ut || (out.ancestors[v] & to_bit)) out.ancestors[v] |= gained;
  }
  return out;
}

std::vector<std::uint64_t> transitive_closure(const std::vector<std::uint64_t>& parents) {
  std::vector<std::uint64_t> anc(parents.size(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t v = 0; v < parents.size(); ++v) {
      std::uint64_t acc = anc[v];
      std::uint64_t ps = parents[v];
      while (ps) {
        int p = std::countr_zero(ps);
        ps &= ps - 1;
        acc |= anc[static_cast<std::size_t>(p)] | (1ull << p);
      }
      if (acc != anc[v]) {
        anc[v] = acc;
        changed = true;
      }
    }
  }
  return anc;
}

std::string canonical_key(const Dag& dag, const VariableSet& vars) {
  std::string out;
  for (std::size_t v = 0; v < vars.size(); ++v) {
    if (v) out += ';';
    out += vars.names[v];
    out += "<-";
    std::uint64_t ps = dag.parents[v];
    bool first = true;
    while (ps) {
      int p = std::countr_zero(ps);
      ps &= ps - 1;
      if (!first) out += ',';
      out += vars.names[static_cast<std::size_t>(p)];
      first = false;
    }
  }
  return out;
}

const std::array<double, 3>& EdgeParams::for_pair(int x, int y) const {
  auto it = per_pair.find({x, y});
  return it == per_pair.end() ? base : it->second;
}

namespace {
void check_triple(const std::array<double, 3>& t, const std::string& what) {
  double sum = 0.0;
  for (double p : t) {
    if (p < 0.0) throw ValidationError(what + ": negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ValidationError(what + ": probabilities sum to " + std::to_string(sum) + ", not 1");
  }
}
}  // namespace

void EdgeParams::validate(const VariableSet& vars) const {
  check_triple(base, "edge probabilities");
  const int n = static_cast<int>(vars.size());
  for (const auto& [key, triple] : per_pair) {
    if (key.first < 0 || key.second <= key.first || key.second >= n) {
      throw ValidationError("pair probabilities: bad pair (" + std::to_string(key.first) + "," +
                            std::to_string(key.second) + ")");
    }
    check_triple(triple, "pair probabilities " + vars.names[static_cast<std::size_t>(key.first)] +
                             "," + vars.names[static_cast<std::size_t>(key.second)]);
  }
}

bool Constraints::empty() const {
  return !ordering && !max_parents && forced_parents.empty() && forbidden_edges.empty() &&
         required_edges.empty();
}

void Constraints::validate(const VariableSet& vars) const {
  const int n = static_cast<int>(vars.size());
  auto check_var = [&](int v, const char* what) {
    if (v < 0 || v >= n) throw InconsistentConstraints(std::string(what) + ": variable index out of range");
  };
  auto check_edge = [&](const std::pair<int, int>& e, const char* what) {
    check_var(e.first, what);
    check_var(e.second, what);
    if (e.first == e.second) throw InconsistentConstraints(std::string(what) + ": self edge");
  };

  std::vector<int> pos(static_cast<std::size_t>(n), -1);
  if (ordering) {
    if (static_cast<int>(ordering->size()) != n) {
      throw InconsistentConstraints("ordering must list every variable exactly once");
    }
    for (std::size_t i = 0; i < ordering->size(); ++i) {
      check_var((*ordering)[i], "ordering");
      if (pos[static_cast<std::size_t>((*ordering)[i])] != -1) {
        throw InconsistentConstraints("ordering repeats a variable");
      }
      pos[static_cast<std::size_t>((*ordering)[i])] = static_cast<int>(i);
    }
  }
  auto order_ok = [&](int parent, int child) {
    return !ordering || pos[static_cast<std::size_t>(parent)] < pos[static_cast<std::size_t>(child)];
  };

  if (max_parents && *max_parents < 0) throw InconsistentConstraints("max_parents must be >= 0");

  for (const auto& e : required_edges) {
    check_edge(e, "required edge");
    if (forbidden_edges.count(e)) {
      throw InconsistentConstraints("edge " + vars.names[static_cast<std::size_t>(e.first)] + "->" +
                                    vars.names[static_cast<std::size_t>(e.second)] +
                                    " both required and forbidden");
    }
    if (required_edges.count({e.second, e.first})) {
      throw InconsistentConstraints("required edges form a 2-cycle");
    }
    if (!order_ok(e.first, e.second)) {
      throw InconsistentConstraints("required edge contradicts the ordering");
    }
  }
  for (const auto& e : forbidden_edges) check_edge(e, "forbidden edge");

  for (const auto& [child, mask] : forced_parents) {
    check_var(child, "forced parents");
    if ((mask >> child) & 1u) throw InconsistentConstraints("forced parents include the child itself");
    if (mask >> n) throw InconsistentConstraints("forced parents reference unknown variables");
    const int count = std::popcount(mask);
    if (max_parents && count > *max_parents) {
      throw InconsistentConstraints("forced parent set of " +
                                    vars.names[static_cast<std::size_t>(child)] +
                                    " exceeds max_parents");
    }
    std::uint64_t ps = mask;
    while (ps) {
      int p = std::countr_zero(ps);
      ps &= ps - 1;
      if (!order_ok(p, child)) {
        throw InconsistentConstraints("forced parent contradicts the ordering");
      }
      if (forbidden_edges.count({p, child})) {
        throw InconsistentConstraints("forced parent is a forbidden edge");
      }
    }
    for (const auto& e : required_edges) {
      if (e.second == child && !((mask >> e.first) & 1u)) {
        throw InconsistentConstraints("required edge into " +
                                      vars.names[static_cast<std::size_t>(child)] +
                                      " is outside its forced parent set");
      }
    }
  }

  // Mandatory edges per child must fit the parent budget, and must be acyclic.
  if (max_parents || !required_edges.empty() || !forced_parents.empty()) {
    std::vector<std::uint64_t> mandatory(static_cast<std::size_t>(n), 0);
    for (const auto& [child, mask] : forced_parents) mandatory[static_cast<std::size_t>(child)] = mask;
    for (const auto& e : required_edges) {
      if (!forced_parents.count(e.second)) {
        mandatory[static_cast<std::size_t>(e.second)] |= 1ull << e.first;
      }
    }
    Dag d(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) {
      if (max_parents && std::popcount(mandatory[static_cast<std::size_t>(c)]) > *max_parents) {
        throw InconsistentConstraints("mandatory parents of " + vars.names[static_cast<std::size_t>(c)] +
                                      " exceed max_parents");
      }
      std::uint64_t ps = mandatory[static_cast<std::size_t>(c)];
      while (ps) {
        int p = std::countr_zero(ps);
        ps &= ps - 1;
        auto next = try_add_edge(d, p, c);
        if (!next) throw InconsistentConstraints("mandatory edges form a directed cycle");
        d = std::move(*next);
      }
    }
  }
}

std::vector<std::pair<int, int>> pair_schedule(std::size_t n) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t j = k; j-- > 0;) {
      pairs.emplace_back(static_cast<int>(j), static_cast<int>(k));
    }
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Pairwise (failure-laden) program
// ---------------------------------------------------------------------------

namespace {

struct PairwiseData {
  VariableSet vars;
  std::vector<std::pair<int, int>> schedule;
  std::vector<Node> choice_nodes;              // per pair, three branches
  std::vector<std::array<bool, 3>> allowed;    // static constraint screen
  std::optional<int> max_parents;

  // Branch b at pair (x, y): 0 = edge y->x, 1 = edge x->y, 2 = none.
  std::pair<int, int> edge_of(std::size_t t, int branch) const {
    auto [x, y] = schedule[t];
    return branch == 0 ? std::pair{y, x} : std::pair{x, y};
  }
};

const Node kFailureNode = Node::failure();

class PairwiseCursor final : public TreeCursor {
 public:
  explicit PairwiseCursor(const PairwiseData& data) : data_(&data) {
    dags_.emplace_back(data.vars.size());
    failed_.push_back(0);
  }

  const Node& node() const override {
    if (failed_.back()) return kFailureNode;
    const std::size_t d = depth();
    if (d == data_->schedule.size()) return success_;
    return data_->choice_nodes[d];
  }

  void descend(int branch) override {
    const std::size_t d = depth();
    if (failed_.back() || d >= data_->schedule.size()) {
      throw Error("pairwise cursor: descend past a leaf");
    }
    Dag next = dags_.back();
    bool ok = data_->allowed[d][static_cast<std::size_t>(branch)];
    if (ok && branch != 2) {
      auto [from, to] = data_->edge_of(d, branch);
      if (data_->max_parents && next.parent_count(to) >= *data_->max_parents) {
        ok = false;
      } else {
        auto added = try_add_edge(next, from, to);
        if (added) {
          next = std::move(*added);
        } else {
          ok = false;
        }
      }
    }
    dags_.push_back(std::move(next));
    failed_.push_back(ok ? 0 : 1);
    if (ok && depth() == data_->schedule.size()) {
      success_ = Node::success(ModelRef{canonical_key(dags_.back(), data_->vars), dags_.back()});
    }
  }

  void truncate(std::size_t new_depth) override {
    dags_.resize(new_depth + 1);
    failed_.resize(new_depth + 1);
  }

  std::size_t depth() const override { return dags_.size() - 1; }

 private:
  const PairwiseData* data_;
  std::vector<Dag> dags_;
  std::vector<char> failed_;
  Node success_;
};

class PairwiseProgram final : public ChoiceProgram {
 public:
  explicit PairwiseProgram(PairwiseData data) : data_(std::move(data)) {}
  std::unique_ptr<TreeCursor> cursor() const override {
    return std::make_unique<PairwiseCursor>(data_);
  }

 private:
  PairwiseData data_;
};

}  // namespace

std::shared_ptr<const ChoiceProgram> build_pairwise_program(const VariableSet& vars,
                                                            const EdgeParams& params,
                                                            const Constraints& constraints) {
  vars.validate();
  params.validate(vars);
  constraints.validate(vars);

  PairwiseData data;
  data.vars = vars;
  data.schedule = pair_schedule(vars.size());
  data.max_parents = constraints.max_parents;

  std::vector<int> pos(vars.size(), 0);
  if (constraints.ordering) {
    for (std::size_t i = 0; i < constraints.ordering->size(); ++i) {
      pos[static_cast<std::size_t>((*constraints.ordering)[i])] = static_cast<int>(i);
    }
  }

  for (std::size_t t = 0; t < data.schedule.size(); ++t) {
    auto [x, y] = data.schedule[t];
    const auto& triple = params.for_pair(x, y);
    data.choice_nodes.push_back(Node::choice({triple[0], triple[1], triple[2]}));

    std::array<bool, 3> allowed{true, true, true};
    for (int b = 0; b < 2; ++b) {
      auto [from, to] = data.edge_of(t, b);
      if (constraints.ordering && pos[static_cast<std::size_t>(from)] > pos[static_cast<std::size_t>(to)]) {
        allowed[static_cast<std::size_t>(b)] = false;
      }
      if (constraints.forbidden_edges.count({from, to})) allowed[static_cast<std::size_t>(b)] = false;
      auto fit = constraints.forced_parents.find(to);
      if (fit != constraints.forced_parents.end() && !((fit->second >> from) & 1u)) {
        allowed[static_cast<std::size_t>(b)] = false;
      }
    }
    // An edge this pair must carry rules out the other two branches.
    for (int b = 0; b < 2; ++b) {
      auto [from, to] = data.edge_of(t, b);
      bool must = constraints.required_edges.count({from, to}) > 0;
      auto fit = constraints.forced_parents.find(to);
      if (fit != constraints.forced_parents.end() && ((fit->second >> from) & 1u)) must = true;
      if (must) {
        for (int o = 0; o < 3; ++o) {
          if (o != b) allowed[static_cast<std::size_t>(o)] = false;
        }
      }
    }
    if (!allowed[0] && !allowed[1] && !allowed[2]) {
      throw InconsistentConstraints("pair " + vars.names[static_cast<std::size_t>(x)] + "," +
                                    vars.names[static_cast<std::size_t>(y)] +
                                    " has no admissible outcome");
    }
    data.allowed.push_back(allowed);
  }

  return std::make_shared<PairwiseProgram>(std::move(data));
}

// ---------------------------------------------------------------------------
// Ordered (failure-free) program
// ---------------------------------------------------------------------------

namespace {

struct OrderedPair {
  int parent = -1;  // the earlier variable in the order
  int child = -1;
  double edge_weight = 0.0;  // prior weight of adding the edge
  double none_weight = 0.0;
  bool mandatory = false;
  bool prohibited = false;
  int reserve_after = 0;  // later pairs that must still add a parent to `child`
};

struct OrderedData {
  VariableSet vars;
  std::vector<OrderedPair> pairs;
  std::optional<int> max_parents;
};

class OrderedCursor final : public TreeCursor {
 public:
  explicit OrderedCursor(const OrderedData& data) : data_(&data) {
    dags_.emplace_back(data.vars.size());
    nodes_.push_back(node_at(0, dags_.back()));
  }

  const Node& node() const override { return nodes_.back(); }

  void descend(int branch) override {
    const std::size_t d = depth();
    if (d >= data_->pairs.size()) throw Error("ordered cursor: descend past a leaf");
    Dag next = dags_.back();
    if (branch == 0) {
      const auto& op = data_->pairs[d];
      auto added = try_add_edge(next, op.parent, op.child);
      if (!added) throw Error("ordered cursor: order-consistent edge closed a cycle");
      next = std::move(*added);
    }
    nodes_.push_back(node_at(d + 1, next));
    dags_.push_back(std::move(next));
  }

  void truncate(std::size_t new_depth) override {
    dags_.resize(new_depth + 1);
    nodes_.resize(new_depth + 1);
  }

  std::size_t depth() const override { return dags_.size() - 1; }

 private:
  Node node_at(std::size_t d, const Dag& dag) const {
    if (d == data_->pairs.size()) {
      return Node::success(ModelRef{canonical_key(dag, data_->vars), dag});
    }
    const auto& op = data_->pairs[d];
    bool edge_ok;
    if (op.mandatory) {
      edge_ok = true;
    } else if (op.prohibited) {
      edge_ok = false;
    } else if (data_->max_parents &&
               dag.parent_count(op.child) + op.reserve_after > *data_->max_parents - 1) {
      edge_ok = false;  // budget reserved for edges later pairs must add
    } else {
      edge_ok = true;
    }
    double we = edge_ok ? op.edge_weight : 0.0;
    double wn = op.mandatory ? 0.0 : op.none_weight;
    const double total = we + wn;
    return Node::choice({we / total, wn / total});
  }

  const OrderedData* data_;
  std::vector<Dag> dags_;
  std::vector<Node> nodes_;
};

class OrderedProgram final : public ChoiceProgram {
 public:
  explicit OrderedProgram(OrderedData data) : data_(std::move(data)) {}
  std::unique_ptr<TreeCursor> cursor() const override {
    return std::make_unique<OrderedCursor>(data_);
  }

 private:
  OrderedData data_;
};

}  // namespace

std::shared_ptr<const ChoiceProgram> build_ordered_program(const VariableSet& vars,
                                                           const std::vector<int>& order,
                                                           const EdgeParams& params,
                                                           const Constraints& constraints) {
  vars.validate();
  params.validate(vars);

  Constraints with_order = constraints;
  if (with_order.ordering) {
    if (*with_order.ordering != order) {
      throw InconsistentConstraints("constraint ordering differs from the program order");
    }
  } else {
    with_order.ordering = order;
  }
  with_order.validate(vars);

  std::vector<int> pos(vars.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    pos[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
  }

  OrderedData data;
  data.vars = vars;
  data.max_parents = constraints.max_parents;

  auto schedule = pair_schedule(vars.size());
  for (auto [x, y] : schedule) {
    const auto& triple = params.for_pair(x, y);
    OrderedPair op;
    if (pos[static_cast<std::size_t>(x)] < pos[static_cast<std::size_t>(y)]) {
      op.parent = x;
      op.child = y;
      op.edge_weight = triple[1];  // y chosen as child of x
    } else {
      op.parent = y;
      op.child = x;
      op.edge_weight = triple[0];  // y chosen as parent of x
    }
    op.none_weight = triple[2];

    auto fit = with_order.forced_parents.find(op.child);
    if (fit != with_order.forced_parents.end()) {
      if ((fit->second >> op.parent) & 1u) {
        op.mandatory = true;
      } else {
        op.prohibited = true;
      }
    }
    if (with_order.required_edges.count({op.parent, op.child})) op.mandatory = true;
    if (with_order.forbidden_edges.count({op.parent, op.child})) op.prohibited = true;

    const std::string pair_name = vars.names[static_cast<std::size_t>(op.parent)] + "->" +
                                  vars.names[static_cast<std::size_t>(op.child)];
    if (op.mandatory && op.edge_weight <= 0.0) {
      throw InconsistentConstraints("mandatory edge " + pair_name + " has zero prior weight");
    }
    if (op.prohibited && op.none_weight <= 0.0) {
      throw InconsistentConstraints("edge " + pair_name +
                                    " is excluded but the no-edge outcome has zero weight");
    }
    if (!op.mandatory && !op.prohibited && op.edge_weight + op.none_weight <= 0.0) {
      throw InconsistentConstraints("pair " + pair_name + " has no positive outcome");
    }
    data.pairs.push_back(op);
  }

  // Suffix counts of pairs that must add a parent edge, so optional edges
  // never exhaust a budget that mandatory edges still need. A zero no-edge
  // weight forces the edge just as a constraint does.
  std::vector<int> pending(vars.size(), 0);
  for (std::size_t t = data.pairs.size(); t-- > 0;) {
    auto& op = data.pairs[t];
    op.reserve_after = pending[static_cast<std::size_t>(op.child)];
    const bool must_edge = !op.prohibited && (op.mandatory || op.none_weight <= 0.0);
    if (must_edge) pending[static_cast<std::size_t>(op.child)] += 1;
  }
  if (data.max_parents) {
    for (std::size_t v = 0; v < vars.size(); ++v) {
      if (pending[v] > *data.max_parents) {
        throw InconsistentConstraints("variable " + vars.names[v] + " must take " +
                                      std::to_string(pending[v]) +
                                      " parents, exceeding max_parents");
      }
    }
  }

  return std::make_shared<OrderedProgram>(std::move(data));
}

std::uint64_t count_dags(int n) {
  if (n < 0) throw ValidationError("count_dags: negative n");
  if (n > 10) {
    throw Overflow("count_dags: the count for n=" + std::to_string(n) +
                   " does not fit in 64 bits");
  }
  // Pascal triangle for the binomials.
  std::vector<std::vector<std::uint64_t>> binom(static_cast<std::size_t>(n) + 1);
  for (int m = 0; m <= n; ++m) {
    binom[static_cast<std::size_t>(m)].assign(static_cast<std::size_t>(m) + 1, 1);
    for (int k = 1; k < m; ++k) {
      binom[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)] =
          binom[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(k - 1)] +
          binom[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(k)];
    }
  }
  std::vector<__int128> a(static_cast<std::size_t>(n) + 1, 0);
  a[0] = 1;
  for (int m = 1; m <= n; ++m) {
    __int128 acc = 0;
    for (int k = 1; k <= m; ++k) {
      __int128 term = static_cast<__int128>(binom[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)]);
      term *= static_cast<__int128>(1) << (k * (m - k));
      term *= a[static_cast<std::size_t>(m - k)];
      acc += (k % 2 == 1) ? term : -term;
    }
    a[static_cast<std::size_t>(m)] = acc;
  }
  return static_cast<std::uint64_t>(a[static_cast<std::size_t>(n)]);
}

}  // namespace treemc
