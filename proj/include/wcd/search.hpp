#ifndef WCD_SEARCH_HPP
#define WCD_SEARCH_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wcd/disclosure.hpp"
#include "wcd/errors.hpp"
#include "wcd/hierarchy.hpp"
#include "wcd/rational.hpp"
#include "wcd/table.hpp"

namespace wcd {

/// Bucketization induced by generalizing every hierarchy attribute to the node's level.
/// Attributes without a hierarchy are not part of the quasi-identifier and are ignored.
inline Bucketization apply(const Table& table, const Hierarchy& hierarchy, const LatticeNode& node) {
  check_node(hierarchy, node);
  std::vector<std::size_t> cols;
  for (const auto& a : hierarchy) {
    auto c = table.attribute_index(a.attribute());
    if (!c) throw ValidationError("hierarchy names unknown attribute '" + a.attribute() + "'");
    cols.push_back(*c);
  }
  std::vector<std::string> persons, ids;
  std::vector<std::size_t> values;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const Record& r = table.record(i);
    std::string key;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (j) key += '|';
      key += hierarchy[j].generalize(r.attributes[cols[j]], node.levels[j]);
    }
    persons.push_back(r.person);
    ids.push_back(cols.empty() ? std::string(kSuppressedLabel) : key);
    values.push_back(table.sensitive_index(i));
  }
  return Bucketization(std::move(persons), table.domain(), std::move(values), ids);
}

/// B <= B' iff every bucket of B' is a union of buckets of B, i.e. every bucket
/// of B lies inside a single bucket of B'.
inline bool leq(const Bucketization& lower, const Bucketization& upper) {
  if (lower.person_count() != upper.person_count()) throw ValidationError("bucketizations cover different persons");
  std::vector<std::size_t> map_upper(lower.person_count());
  for (std::size_t p = 0; p < lower.person_count(); ++p) {
    auto q = upper.person_index(lower.persons()[p]);
    if (!q) throw ValidationError("bucketizations cover different persons");
    map_upper[p] = upper.bucket_of(*q);
  }
  for (const auto& bucket : lower.buckets()) {
    const std::size_t target = map_upper[bucket.members().front()];
    for (auto p : bucket.members())
      if (map_upper[p] != target) return false;
  }
  return true;
}

/// (c, k)-safety: maximum disclosure w.r.t. k implications strictly below c.
struct SafetyThreshold {
  Rational c;
  std::size_t k = 0;

  SafetyThreshold(Rational c_, std::size_t k_) : c(std::move(c_)), k(k_) {
    if (c < 0 || c > 1) throw ValidationError("threshold c must lie in [0, 1]");
  }
};

inline bool is_safe(const Bucketization& b, const SafetyThreshold& t, DisclosureEngine& engine) {
  return engine.max_disclosure(b, t.k).disclosure < t.c;
}

inline bool is_safe(const Bucketization& b, const SafetyThreshold& t) {
  DisclosureEngine engine;
  return is_safe(b, t, engine);
}

// ---------------------------------------------------------------------------
// Chain search
// ---------------------------------------------------------------------------

struct ChainSearchResult {
  std::optional<std::size_t> index;  // position of the lowest safe node in the chain
  std::optional<LatticeNode> node;
  std::size_t probes = 0;
};

/// Lowest safe node on a chain ordered bottom to top. Safety is monotone along the
/// chain (coarser bucketizations never disclose more), so binary search applies.
inline ChainSearchResult binary_search_chain(const Table& table, const Hierarchy& hierarchy,
                                             const std::vector<LatticeNode>& chain, const SafetyThreshold& threshold) {
  for (const auto& n : chain) check_node(hierarchy, n);
  for (std::size_t i = 1; i < chain.size(); ++i)
    if (!componentwise_leq(chain[i - 1], chain[i]))
      throw ValidationError("chain is not ordered: " + to_string(chain[i - 1]) + " then " + to_string(chain[i]));
  ChainSearchResult result;
  DisclosureEngine engine;
  std::size_t lo = 0, hi = chain.size();  // answer in [lo, hi]; hi means none
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    ++result.probes;
    if (is_safe(apply(table, hierarchy, chain[mid]), threshold, engine))
      hi = mid;
    else
      lo = mid + 1;
  }
  if (lo < chain.size()) {
    result.index = lo;
    result.node = chain[lo];
  }
  return result;
}

/// Parses `attr=lo..hi` / `attr=level` items separated by commas into a chain.
/// Ranged attributes are raised one step at a time, in the order listed; attributes
/// not mentioned stay at level 0.
inline std::vector<LatticeNode> parse_chain(std::string_view text, const Hierarchy& hierarchy) {
  auto index_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < hierarchy.size(); ++i)
      if (hierarchy[i].attribute() == name) return i;
    throw ValidationError("chain names unknown attribute '" + name + "'");
  };
  auto number = [&](std::string_view s) -> std::size_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string_view::npos)
      throw ValidationError("bad level '" + std::string(s) + "' in chain");
    return static_cast<std::size_t>(std::stoul(std::string(s)));
  };
  LatticeNode start = bottom_node(hierarchy);
  std::vector<std::pair<std::size_t, std::size_t>> ranges;  // (attribute, hi)
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto comma = text.find(',', pos);
    auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    pos = comma == std::string_view::npos ? text.size() : comma + 1;
    auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ValidationError("chain item '" + std::string(item) + "' needs '='");
    std::size_t attr = index_of(std::string(item.substr(0, eq)));
    auto spec = item.substr(eq + 1);
    if (auto dots = spec.find(".."); dots != std::string_view::npos) {
      std::size_t lo = number(spec.substr(0, dots)), hi = number(spec.substr(dots + 2));
      if (lo > hi) throw ValidationError("empty range in chain item '" + std::string(item) + "'");
      start.levels[attr] = lo;
      ranges.emplace_back(attr, hi);
    } else {
      start.levels[attr] = number(spec);
    }
  }
  check_node(hierarchy, start);
  std::vector<LatticeNode> chain{start};
  LatticeNode cur = start;
  for (auto [attr, hi] : ranges) {
    while (cur.levels[attr] < hi) {
      ++cur.levels[attr];
      check_node(hierarchy, cur);
      chain.push_back(cur);
    }
  }
  return chain;
}

// ---------------------------------------------------------------------------
// All minimal safe nodes
// ---------------------------------------------------------------------------

struct LatticeSearchOptions {
  std::size_t budget = 100'000;  // maximum lattice size
  bool reuse_memo = false;       // share per-bucket tables across nodes
};

struct LatticeSearchResult {
  std::vector<LatticeNode> minimal;  // sorted
  std::size_t evaluated = 0;         // nodes whose disclosure was computed
};

/// Every safe node whose strict predecessors are all unsafe, found bottom-up by
/// height. A node with a safe direct predecessor is itself safe and not minimal,
/// so it is skipped without evaluation.
inline LatticeSearchResult all_minimal_safe(const Table& table, const Hierarchy& hierarchy,
                                            const SafetyThreshold& threshold, const LatticeSearchOptions& options = {}) {
  const std::size_t size = lattice_size(hierarchy);
  if (size > options.budget)
    throw BudgetExceeded("lattice exceeds budget of " + std::to_string(options.budget), Integer(size));
  enum class State { unsafe, safe_minimal, safe_implied };
  std::map<LatticeNode, State> state;
  LatticeSearchResult result;
  DisclosureEngine shared;
  for (const auto& node : lattice_nodes(hierarchy)) {
    bool implied = false;
    for (std::size_t i = 0; i < node.levels.size() && !implied; ++i) {
      if (node.levels[i] == 0) continue;
      LatticeNode pred = node;
      --pred.levels[i];
      implied = state.at(pred) != State::unsafe;
    }
    if (implied) {
      state[node] = State::safe_implied;
      continue;
    }
    ++result.evaluated;
    DisclosureEngine local;
    DisclosureEngine& engine = options.reuse_memo ? shared : local;
    if (is_safe(apply(table, hierarchy, node), threshold, engine)) {
      state[node] = State::safe_minimal;
      result.minimal.push_back(node);
    } else {
      state[node] = State::unsafe;
    }
  }
  std::sort(result.minimal.begin(), result.minimal.end());
  return result;
}

/// Default utility cost: total generalization height.
struct HeightCost {
  Rational operator()(const LatticeNode& n, const Table&, const Hierarchy&) const { return Rational(Integer(n.height())); }
};

/// Discernibility cost: sum of squared bucket sizes of the induced bucketization.
struct DiscernibilityCost {
  Rational operator()(const LatticeNode& n, const Table& t, const Hierarchy& h) const {
    Integer cost = 0;
    for (const auto& b : apply(t, h, n).buckets()) cost += Integer(b.size()) * b.size();
    return Rational(cost);
  }
};

/// Candidate with the least cost; ties go to the lexicographically least vector.
template <typename Cost = HeightCost>
LatticeNode select_by_utility(const std::vector<LatticeNode>& nodes, const Table& table, const Hierarchy& hierarchy,
                              Cost cost = {}) {
  if (nodes.empty()) throw ValidationError("no candidate nodes to select from");
  const LatticeNode* best = nullptr;
  Rational best_cost;
  for (const auto& n : nodes) {
    Rational c = cost(n, table, hierarchy);
    if (!best || c < best_cost || (c == best_cost && n < *best)) {
      best = &n;
      best_cost = c;
    }
  }
  return *best;
}

}  // namespace wcd

#endif  // WCD_SEARCH_HPP
