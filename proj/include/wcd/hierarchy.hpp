#ifndef WCD_HIERARCHY_HPP
#define WCD_HIERARCHY_HPP

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wcd/errors.hpp"

namespace wcd {

inline constexpr const char* kSuppressedLabel = "*";

/// One generalization step: either an explicit raw -> label map or full suppression.
struct GeneralizationLevel {
  bool suppress = false;
  std::map<std::string, std::string> labels;
};

/// Full-domain generalization hierarchy for one attribute. Level 0 is the identity
/// and is implicit; `levels()[j]` describes level j + 1. The top level maps every
/// value to a single label, and each level refines the next.
class AttributeHierarchy {
 public:
  AttributeHierarchy(std::string attribute, std::vector<GeneralizationLevel> levels)
      : attribute_(std::move(attribute)), levels_(std::move(levels)) {
    validate();
  }

  const std::string& attribute() const noexcept { return attribute_; }

  /// Highest level index L_a.
  std::size_t height() const noexcept { return levels_.size(); }

  const std::vector<GeneralizationLevel>& levels() const noexcept { return levels_; }

  std::string generalize(const std::string& raw, std::size_t level) const {
    if (level == 0) return raw;
    if (level > height())
      throw ValidationError("level " + std::to_string(level) + " out of range for attribute '" + attribute_ + "'");
    const auto& l = levels_[level - 1];
    if (l.suppress) return kSuppressedLabel;
    auto it = l.labels.find(raw);
    if (it == l.labels.end())
      throw ValidationError("value '" + raw + "' of attribute '" + attribute_ + "' missing from level " +
                            std::to_string(level));
    return it->second;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("hierarchy for '" + attribute_ + "': " + what);
  }

  static std::set<std::string> label_set(const GeneralizationLevel& l) {
    std::set<std::string> out;
    for (const auto& [raw, label] : l.labels) out.insert(label);
    return out;
  }

  void validate() const {
    for (std::size_t j = 0; j < levels_.size(); ++j) {
      const auto& l = levels_[j];
      if (!l.suppress && l.labels.empty()) fail("level " + std::to_string(j + 1) + " is empty");
    }
    for (std::size_t j = 0; j + 1 < levels_.size(); ++j) {
      const auto& lower = levels_[j];
      const auto& upper = levels_[j + 1];
      if (upper.suppress) continue;
      if (lower.suppress) {
        if (label_set(upper).size() > 1) fail("level " + std::to_string(j + 2) + " splits a suppressed level");
        continue;
      }
      std::map<std::string, std::string> induced;
      for (const auto& [raw, label] : lower.labels) {
        auto up = upper.labels.find(raw);
        if (up == upper.labels.end()) fail("value '" + raw + "' missing from level " + std::to_string(j + 2));
        auto [it, inserted] = induced.emplace(label, up->second);
        if (!inserted && it->second != up->second)
          fail("level " + std::to_string(j + 1) + " does not refine level " + std::to_string(j + 2));
      }
    }
    if (!levels_.empty() && !levels_.back().suppress && label_set(levels_.back()).size() > 1)
      fail("top level must map every value to one label");
  }

  std::string attribute_;
  std::vector<GeneralizationLevel> levels_;
};

/// Hierarchies for the quasi-identifier attributes, in lattice coordinate order.
using Hierarchy = std::vector<AttributeHierarchy>;

/// Parses
///   {"attributes": [{"name": "Age", "levels": [{"23": "2*", ...}, "suppress"]}, ...]}
/// Each level is a raw -> label object or the keyword "suppress".
inline Hierarchy parse_hierarchy(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("hierarchy is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("attributes") || !doc["attributes"].is_array())
    throw ValidationError("hierarchy must be an object with an \"attributes\" array");
  Hierarchy out;
  std::set<std::string> names;
  for (const auto& attr : doc["attributes"]) {
    if (!attr.is_object() || !attr.contains("name") || !attr["name"].is_string())
      throw ValidationError("hierarchy attribute entries need a string \"name\"");
    std::string name = attr["name"].get<std::string>();
    if (!names.insert(name).second) throw ValidationError("attribute '" + name + "' listed twice in hierarchy");
    std::vector<GeneralizationLevel> levels;
    if (attr.contains("levels")) {
      if (!attr["levels"].is_array()) throw ValidationError("\"levels\" of '" + name + "' must be an array");
      for (const auto& level : attr["levels"]) {
        GeneralizationLevel l;
        if (level.is_string() && level.get<std::string>() == "suppress") {
          l.suppress = true;
        } else if (level.is_object()) {
          for (const auto& [raw, label] : level.items()) {
            if (!label.is_string()) throw ValidationError("labels of '" + name + "' must be strings");
            l.labels.emplace(raw, label.get<std::string>());
          }
        } else {
          throw ValidationError("level of '" + name + "' must be an object or \"suppress\"");
        }
        levels.push_back(std::move(l));
      }
    }
    out.emplace_back(std::move(name), std::move(levels));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lattice nodes
// ---------------------------------------------------------------------------

/// Generalization vector: one level per hierarchy attribute.
struct LatticeNode {
  std::vector<std::size_t> levels;

  std::size_t height() const {
    std::size_t h = 0;
    for (auto l : levels) h += l;
    return h;
  }

  friend auto operator<=>(const LatticeNode&, const LatticeNode&) = default;
};

inline std::string to_string(const LatticeNode& n) {
  std::string out = "(";
  for (std::size_t i = 0; i < n.levels.size(); ++i) out += (i ? "," : "") + std::to_string(n.levels[i]);
  return out + ")";
}

/// Componentwise order on generalization vectors.
inline bool componentwise_leq(const LatticeNode& a, const LatticeNode& b) {
  if (a.levels.size() != b.levels.size()) throw ValidationError("lattice nodes of different dimension");
  for (std::size_t i = 0; i < a.levels.size(); ++i)
    if (a.levels[i] > b.levels[i]) return false;
  return true;
}

inline void check_node(const Hierarchy& h, const LatticeNode& n) {
  if (n.levels.size() != h.size())
    throw ValidationError("node " + to_string(n) + " has " + std::to_string(n.levels.size()) + " coordinates, expected " +
                          std::to_string(h.size()));
  for (std::size_t i = 0; i < h.size(); ++i)
    if (n.levels[i] > h[i].height())
      throw ValidationError("node " + to_string(n) + " exceeds height of '" + h[i].attribute() + "'");
}

inline LatticeNode bottom_node(const Hierarchy& h) { return {std::vector<std::size_t>(h.size(), 0)}; }

inline LatticeNode top_node(const Hierarchy& h) {
  LatticeNode n;
  for (const auto& a : h) n.levels.push_back(a.height());
  return n;
}

/// Number of nodes in the product lattice.
inline std::size_t lattice_size(const Hierarchy& h) {
  std::size_t n = 1;
  for (const auto& a : h) n *= a.height() + 1;
  return n;
}

/// Every node, ordered by height then lexicographically.
inline std::vector<LatticeNode> lattice_nodes(const Hierarchy& h) {
  std::vector<LatticeNode> out;
  LatticeNode n = bottom_node(h);
  while (true) {
    out.push_back(n);
    std::size_t i = h.size();
    while (i > 0 && n.levels[i - 1] == h[i - 1].height()) n.levels[--i] = 0;
    if (i == 0) break;
    ++n.levels[i - 1];
  }
  std::stable_sort(out.begin(), out.end(), [](const LatticeNode& a, const LatticeNode& b) {
    return a.height() != b.height() ? a.height() < b.height() : a < b;
  });
  return out;
}

}  // namespace wcd

#endif  // WCD_HIERARCHY_HPP
