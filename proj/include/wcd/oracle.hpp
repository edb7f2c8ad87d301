#ifndef WCD_ORACLE_HPP
#define WCD_ORACLE_HPP

// Exact random-worlds reasoning by exhaustive enumeration.
//
// Every table consistent with a bucketization is equally likely. A world fixes
// one sensitive value per person such that each bucket's multiset is realised
// exactly. Distinct assignments within a bucket are enumerated directly (each
// is induced by the same number of raw permutations, so uniform weighting over
// distinct assignments is exact) and worlds are the cross product over buckets.
//
// Cost is exponential in the instance size. Every entry point checks its
// enumeration size against a budget before doing any work.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wcd/errors.hpp"
#include "wcd/knowledge.hpp"
#include "wcd/rational.hpp"
#include "wcd/table.hpp"

namespace wcd {

inline constexpr std::uint64_t kDefaultWorldBudget = 10'000'000;

struct OracleOptions {
  std::uint64_t budget = kDefaultWorldBudget;
};

/// An atom resolved to (person index, domain value index).
struct AtomRef {
  std::size_t person = 0;
  std::size_t value = 0;

  friend auto operator<=>(const AtomRef&, const AtomRef&) = default;
};

struct ResolvedImplication {
  std::vector<AtomRef> antecedent;
  std::vector<AtomRef> consequent;

  friend auto operator<=>(const ResolvedImplication&, const ResolvedImplication&) = default;
};

using ResolvedKnowledge = std::vector<ResolvedImplication>;

inline AtomRef resolve(const Atom& a, const Bucketization& b) {
  validate(a, b);
  return {*b.person_index(a.person), *b.value_index(a.value)};
}

inline ResolvedKnowledge resolve(const Knowledge& k, const Bucketization& b) {
  validate(k, b);
  ResolvedKnowledge out;
  out.reserve(k.size());
  for (const auto& imp : k.implications) {
    ResolvedImplication r;
    for (const auto& a : imp.antecedent) r.antecedent.push_back(resolve(a, b));
    for (const auto& a : imp.consequent) r.consequent.push_back(resolve(a, b));
    out.push_back(std::move(r));
  }
  return out;
}

inline Atom to_atom(const AtomRef& a, const Bucketization& b) { return {b.persons()[a.person], b.domain()[a.value]}; }

namespace detail {

inline Integer factorial(std::size_t n) {
  Integer f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

inline bool implication_holds(const ResolvedImplication& imp, const std::vector<std::size_t>& assignment) {
  for (const auto& a : imp.antecedent)
    if (assignment[a.person] != a.value) return true;
  for (const auto& a : imp.consequent)
    if (assignment[a.person] == a.value) return true;
  return false;
}

inline bool knowledge_holds(const ResolvedKnowledge& k, const std::vector<std::size_t>& assignment) {
  for (const auto& imp : k)
    if (!implication_holds(imp, assignment)) return false;
  return true;
}

}  // namespace detail

/// Number of distinct tables consistent with the bucketization:
/// the product over buckets of n_b! / prod_s n_b(s)!.
inline Integer world_count(const Bucketization& b) {
  Integer total = 1;
  for (const auto& bucket : b.buckets()) {
    Integer w = detail::factorial(bucket.size());
    for (const auto& e : bucket.histogram()) w /= detail::factorial(e.count);
    total *= w;
  }
  return total;
}

inline void check_budget(const Integer& requested, std::uint64_t budget, const char* what) {
  if (requested > budget) throw BudgetExceeded(std::string(what) + " exceeds budget of " + std::to_string(budget), requested);
}

/// Calls `visit(assignment)` once per world; `assignment[p]` is person p's value index.
template <typename Visitor>
void for_each_world(const Bucketization& b, Visitor&& visit, const OracleOptions& options = {}) {
  check_budget(world_count(b), options.budget, "world enumeration");
  const auto& buckets = b.buckets();
  std::vector<std::vector<std::size_t>> perms(buckets.size());
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    for (const auto& e : buckets[i].histogram()) perms[i].insert(perms[i].end(), e.count, e.value);
    std::sort(perms[i].begin(), perms[i].end());
  }
  std::vector<std::size_t> assignment(b.person_count());
  auto write = [&](std::size_t i) {
    const auto& members = buckets[i].members();
    for (std::size_t j = 0; j < members.size(); ++j) assignment[members[j]] = perms[i][j];
  };
  for (std::size_t i = 0; i < buckets.size(); ++i) write(i);
  while (true) {
    visit(static_cast<const std::vector<std::size_t>&>(assignment));
    // odometer, last bucket fastest; next_permutation wraps to sorted order on exhaustion
    std::size_t i = buckets.size();
    while (i > 0) {
      --i;
      bool advanced = std::next_permutation(perms[i].begin(), perms[i].end());
      write(i);
      if (advanced) break;
      if (i == 0) return;
    }
    if (buckets.empty()) return;
  }
}

// ---------------------------------------------------------------------------
// Posterior by projected enumeration
// ---------------------------------------------------------------------------

/// Pr(target | B and knowledge) as an exact fraction of knowledge-satisfying worlds.
///
/// Only persons mentioned by the knowledge or the target are enumerated; each
/// partial assignment is weighted by the number of worlds completing it, which
/// is exact because unmentioned persons never affect the events being counted.
/// The budget caps the number of partial assignments visited.
inline Probability exact_posterior(const Bucketization& b, const Knowledge& knowledge, const Atom& target,
                                   const OracleOptions& options = {}) {
  const ResolvedKnowledge k = resolve(knowledge, b);
  const AtomRef t = resolve(target, b);

  std::vector<std::vector<std::size_t>> involved(b.bucket_count());
  {
    std::set<std::size_t> persons{t.person};
    for (const auto& imp : k) {
      for (const auto& a : imp.antecedent) persons.insert(a.person);
      for (const auto& a : imp.consequent) persons.insert(a.person);
    }
    for (auto p : persons) involved[b.bucket_of(p)].push_back(p);
  }

  // per involved bucket: the feasible partial assignments and their completion counts
  struct Partial {
    std::vector<std::size_t> values;
    Integer weight;
  };
  std::vector<std::size_t> order;
  std::vector<std::vector<Partial>> partials;
  Integer projected = 1;
  for (std::size_t bi = 0; bi < b.bucket_count(); ++bi) {
    if (involved[bi].empty()) continue;
    const Bucket& bucket = b.bucket(bi);
    const auto& hist = bucket.histogram();
    const std::size_t t_count = involved[bi].size();
    std::vector<Partial> list;
    std::vector<std::size_t> remaining(hist.size());
    for (std::size_t j = 0; j < hist.size(); ++j) remaining[j] = hist[j].count;
    std::vector<std::size_t> chosen;
    const Integer rest = detail::factorial(bucket.size() - t_count);
    std::function<void()> extend = [&] {
      if (chosen.size() == t_count) {
        Integer w = rest;
        for (auto r : remaining) w /= detail::factorial(r);
        std::vector<std::size_t> values;
        for (auto j : chosen) values.push_back(hist[j].value);
        list.push_back({std::move(values), std::move(w)});
        check_budget(projected * list.size(), options.budget, "posterior enumeration");
        return;
      }
      for (std::size_t j = 0; j < hist.size(); ++j) {
        if (remaining[j] == 0) continue;
        --remaining[j];
        chosen.push_back(j);
        extend();
        chosen.pop_back();
        ++remaining[j];
      }
    };
    extend();
    projected *= list.size();
    check_budget(projected, options.budget, "posterior enumeration");
    order.push_back(bi);
    partials.push_back(std::move(list));
  }

  std::vector<std::size_t> assignment(b.person_count(), static_cast<std::size_t>(-1));
  std::vector<std::size_t> cursor(partials.size(), 0);
  Integer satisfied = 0, with_target = 0;
  while (true) {
    Integer w = 1;
    for (std::size_t i = 0; i < partials.size(); ++i) {
      const auto& part = partials[i][cursor[i]];
      const auto& members = involved[order[i]];
      for (std::size_t j = 0; j < members.size(); ++j) assignment[members[j]] = part.values[j];
      w *= part.weight;
    }
    if (detail::knowledge_holds(k, assignment)) {
      satisfied += w;
      if (assignment[t.person] == t.value) with_target += w;
    }
    std::size_t i = partials.size();
    while (i > 0 && ++cursor[i - 1] == partials[i - 1].size()) cursor[--i] = 0;
    if (i == 0) break;
  }
  if (satisfied == 0) throw InconsistentKnowledge("no world consistent with the bucketization satisfies the knowledge");
  return Probability(with_target, satisfied);
}

// ---------------------------------------------------------------------------
// Materialised worlds with per-atom bitsets
// ---------------------------------------------------------------------------

/// A set of worlds, one bit per world.
class WorldSet {
 public:
  WorldSet() = default;
  WorldSet(std::size_t size, bool fill) : size_(size), words_((size + 63) / 64, fill ? ~std::uint64_t{0} : 0) {
    trim();
  }

  std::size_t size() const noexcept { return size_; }

  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }

  std::uint64_t count() const noexcept {
    std::uint64_t c = 0;
    for (auto w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
    return c;
  }

  /// |this & other| without materialising the intersection.
  std::uint64_t count_and(const WorldSet& other) const noexcept {
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) c += static_cast<std::uint64_t>(std::popcount(words_[i] & other.words_[i]));
    return c;
  }

  WorldSet& operator&=(const WorldSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  WorldSet& operator|=(const WorldSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  WorldSet operator~() const {
    WorldSet out = *this;
    for (auto& w : out.words_) w = ~w;
    out.trim();
    return out;
  }
  friend WorldSet operator&(WorldSet a, const WorldSet& b) { return a &= b; }
  friend WorldSet operator|(WorldSet a, const WorldSet& b) { return a |= b; }
  friend bool operator==(const WorldSet&, const WorldSet&) = default;

  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

 private:
  void trim() {
    if (size_ % 64 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct WorldSetHash {
  std::size_t operator()(const WorldSet& s) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto w : s.words()) h = (h ^ w) * 1099511628211ull + (h >> 29);
    return static_cast<std::size_t>(h);
  }
};

/// Every world of a bucketization, materialised as one bitset per atom.
class EnumeratedWorlds {
 public:
  explicit EnumeratedWorlds(const Bucketization& b, const OracleOptions& options = {})
      : domain_size_(b.domain().size()) {
    Integer total = world_count(b);
    check_budget(total, options.budget, "world enumeration");
    size_ = static_cast<std::size_t>(total);
    masks_.assign(b.person_count() * domain_size_, WorldSet(size_, false));
    std::size_t w = 0;
    for_each_world(
        b,
        [&](const std::vector<std::size_t>& assignment) {
          for (std::size_t p = 0; p < assignment.size(); ++p) masks_[p * domain_size_ + assignment[p]].set(w);
          ++w;
        },
        options);
  }

  std::size_t size() const noexcept { return size_; }

  const WorldSet& atom(const AtomRef& a) const { return masks_.at(a.person * domain_size_ + a.value); }

  WorldSet all() const { return WorldSet(size_, true); }

  WorldSet satisfying(const ResolvedImplication& imp) const {
    WorldSet ante(size_, true);
    for (const auto& a : imp.antecedent) ante &= atom(a);
    WorldSet cons(size_, false);
    for (const auto& a : imp.consequent) cons |= atom(a);
    return ~ante | cons;
  }

  WorldSet satisfying(const ResolvedKnowledge& k) const {
    WorldSet out = all();
    for (const auto& imp : k) out &= satisfying(imp);
    return out;
  }

  /// Pr(target | knowledge) over the materialised worlds.
  Probability posterior(const ResolvedKnowledge& k, const AtomRef& target) const {
    WorldSet sat = satisfying(k);
    auto total = sat.count();
    if (total == 0) throw InconsistentKnowledge("no world satisfies the knowledge");
    return Probability(Integer(sat.count_and(atom(target))), Integer(total));
  }

 private:
  std::size_t domain_size_;
  std::size_t size_ = 0;
  std::vector<WorldSet> masks_;
};

// ---------------------------------------------------------------------------
// Brute-force maximum disclosure
// ---------------------------------------------------------------------------

enum class KnowledgeClass {
  simple,                      // k arbitrary simple implications A_i -> B_i
  simple_common_consequent,    // k simple implications A_i -> C sharing one consequent
  negated_atoms,               // k negated atoms, each encoded as an implication
};

struct BruteForceOptions {
  std::uint64_t budget = kDefaultWorldBudget;
  std::size_t max_k = 3;
};

struct BruteForceResult {
  Probability disclosure;
  Knowledge witness;
  Atom target;
};

/// Exact maximum of Pr(target | B and phi) over every phi made of k implications
/// from the class (repetition allowed, so fewer distinct implications are covered)
/// and every target atom.
///
/// In the implication classes, atoms whose value cannot occur for their person
/// are omitted: each such implication is equivalent to one that is kept. The
/// tautology A -> A stays in the implication classes so that k >= 1 also covers
/// knowledge sets with fewer effective implications. The witness
/// is the least (target, sorted implication list) among the maximisers, in
/// (person index, value index) order.
inline BruteForceResult brute_force_max_disclosure(const Bucketization& b, std::size_t k, KnowledgeClass cls,
                                                   const BruteForceOptions& options = {}) {
  if (k > options.max_k)
    throw BudgetExceeded("knowledge size k exceeds brute-force limit " + std::to_string(options.max_k), Integer(k));
  const EnumeratedWorlds worlds(b, {options.budget});

  std::vector<AtomRef> atoms;
  for (std::size_t p = 0; p < b.person_count(); ++p)
    for (const auto& e : b.bucket(b.bucket_of(p)).histogram()) atoms.push_back({p, e.value});
  std::sort(atoms.begin(), atoms.end());

  struct Candidate {
    ResolvedImplication implication;
    WorldSet satisfied;
  };
  // Candidate lists in lexicographic order, one representative per satisfying set.
  auto dedupe = [&](std::vector<ResolvedImplication> imps) {
    std::sort(imps.begin(), imps.end());
    std::vector<Candidate> out;
    std::unordered_map<WorldSet, std::size_t, WorldSetHash> seen;
    for (auto& imp : imps) {
      WorldSet sat = worlds.satisfying(ResolvedKnowledge{imp});
      if (seen.emplace(sat, out.size()).second) out.push_back({std::move(imp), std::move(sat)});
    }
    return out;
  };

  std::vector<std::vector<Candidate>> families;
  switch (cls) {
    case KnowledgeClass::simple: {
      std::vector<ResolvedImplication> imps;
      for (const auto& a : atoms)
        for (const auto& c : atoms) imps.push_back({{a}, {c}});
      families.push_back(dedupe(std::move(imps)));
      break;
    }
    case KnowledgeClass::simple_common_consequent:
      for (const auto& c : atoms) {
        std::vector<ResolvedImplication> imps;
        for (const auto& a : atoms) imps.push_back({{a}, {c}});
        families.push_back(dedupe(std::move(imps)));
      }
      break;
    case KnowledgeClass::negated_atoms: {
      std::vector<ResolvedImplication> imps;
      if (b.domain().size() >= 2) {
        // every atom, including those false for their person: negating one is a tautology
        for (std::size_t p = 0; p < b.person_count(); ++p)
          for (std::size_t v = 0; v < b.domain().size(); ++v) {
            const AtomRef a{p, v};
            SimpleImplication neg = negation_as_implication(to_atom(a, b), b.domain());
            imps.push_back({{a}, {resolve(neg.consequent, b)}});
          }
      }
      families.push_back(dedupe(std::move(imps)));
      break;
    }
  }

  bool found = false;
  std::uint64_t best_num = 0, best_den = 1;
  AtomRef best_target;
  std::vector<ResolvedImplication> best_list;

  std::vector<const Candidate*> chosen;
  auto consider = [&](const WorldSet& sat) {
    const std::uint64_t total = sat.count();
    if (total == 0) return;
    for (const auto& t : atoms) {
      const std::uint64_t hit = sat.count_and(worlds.atom(t));
      const unsigned __int128 lhs = static_cast<unsigned __int128>(hit) * best_den;
      const unsigned __int128 rhs = static_cast<unsigned __int128>(best_num) * total;
      bool better = !found || lhs > rhs;
      if (!better && lhs == rhs) {
        if (t < best_target) {
          better = true;
        } else if (t == best_target) {
          std::vector<ResolvedImplication> list;
          for (auto* c : chosen) list.push_back(c->implication);
          better = list < best_list;
        }
      }
      if (better) {
        found = true;
        best_num = hit;
        best_den = total;
        best_target = t;
        best_list.clear();
        for (auto* c : chosen) best_list.push_back(c->implication);
      }
    }
  };

  for (const auto& family : families) {
    // nondecreasing index tuples of length k: multisets of candidates
    std::function<void(std::size_t, const WorldSet&)> descend = [&](std::size_t from, const WorldSet& sat) {
      if (chosen.size() == k) {
        consider(sat);
        return;
      }
      for (std::size_t i = from; i < family.size(); ++i) {
        WorldSet next = sat & family[i].satisfied;
        if (next.count() == 0) continue;
        chosen.push_back(&family[i]);
        descend(i, next);
        chosen.pop_back();
      }
    };
    descend(0, worlds.all());
  }
  if (!found) throw InconsistentKnowledge("no consistent knowledge set in the class");

  BruteForceResult result;
  result.disclosure = Probability(Integer(best_num), Integer(best_den));
  result.target = to_atom(best_target, b);
  for (const auto& imp : best_list) {
    BasicImplication basic;
    for (const auto& a : imp.antecedent) basic.antecedent.push_back(to_atom(a, b));
    for (const auto& a : imp.consequent) basic.consequent.push_back(to_atom(a, b));
    result.witness.add(std::move(basic));
  }
  return result;
}

}  // namespace wcd

#endif  // WCD_ORACLE_HPP
