#ifndef WCD_DISCLOSURE_HPP
#define WCD_DISCLOSURE_HPP

// Maximum disclosure with respect to k implications, in polynomial time.
//
// The worst case is attained by k simple implications A_i -> A sharing one
// consequent, and then
//
//   Pr(A | B, and_i (A_i -> A)) = 1 / (1 + r),
//   r = Pr(not A and_i not A_i | B) / Pr(A | B).
//
// r is minimised by two memoised dynamic programs: one over the ways of spreading
// atoms over the persons of a single bucket (closed form per spread), and one over
// the ways of spreading atoms over buckets.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wcd/errors.hpp"
#include "wcd/knowledge.hpp"
#include "wcd/rational.hpp"
#include "wcd/table.hpp"

namespace wcd {

/// Atoms per involved person, k_0 >= k_1 >= ... >= k_{l-1} >= 1.
using AtomPartition = std::vector<std::size_t>;

inline bool is_valid_partition(const AtomPartition& p) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0) return false;
    if (i && p[i] > p[i - 1]) return false;
  }
  return true;
}

/// Minimum of Pr(no atom holds | B) over atom sets of the given shape in one bucket:
/// prod_i max(0, n_b - i - sum_{j<k_i} n_b(s_b^j)) / (n_b - i).
inline Probability closed_form_minimum(const Bucket& bucket, const AtomPartition& partition) {
  if (!is_valid_partition(partition)) throw ValidationError("atom partition must be positive and non-increasing");
  const std::size_t n = bucket.size();
  if (partition.size() > n)
    throw ValidationError("partition involves " + std::to_string(partition.size()) + " persons but the bucket has " +
                          std::to_string(n));
  Probability value = 1;
  for (std::size_t i = 0; i < partition.size(); ++i) {
    std::size_t excluded = 0;
    for (std::size_t j = 0; j < partition[i]; ++j) excluded += bucket.count_at_rank(j);
    if (excluded + i >= n) return Probability(0);
    value *= Probability(Integer(n - i - excluded), Integer(n - i));
  }
  return value;
}

// ---------------------------------------------------------------------------
// Within one bucket
// ---------------------------------------------------------------------------

/// Per-bucket minima for every atom budget h = 0..max_atoms.
struct WithinBucketSummary {
  std::vector<Probability> minimum;       // minimum[h]
  std::vector<AtomPartition> partition;   // a minimising partition for each h
  std::size_t memo_entries = 0;           // memo cells filled while computing
  std::size_t max_atoms = 0;
};

namespace detail {

inline Integer to_integer(unsigned __int128 v) {
  Integer hi = static_cast<std::uint64_t>(v >> 64);
  Integer lo = static_cast<std::uint64_t>(v);
  return (hi << 64) + lo;
}
inline const Integer& to_integer(const Integer& v) { return v; }

/// Memoised search over (person index i, cap on k_i, atoms left).
///
/// Values are kept as integers over the common denominator
/// D_i = prod_{j=i}^{L-1} (n_b - j), where L is the number of persons that can be
/// involved. Every candidate at level i shares D_i, so minimisation is integer
/// comparison. `Int` is unsigned __int128 when the products fit, else Integer.
template <typename Int>
class WithinBucketSolver {
 public:
  WithinBucketSolver(const Bucket& bucket, std::size_t max_atoms)
      : n_(bucket.size()), k_(max_atoms), persons_(std::min(bucket.size(), max_atoms)), distinct_(bucket.distinct()) {
    prefix_.assign(k_ + 1, 0);
    for (std::size_t j = 1; j <= k_; ++j) prefix_[j] = prefix_[j - 1] + bucket.count_at_rank(j - 1);
    denominators_.assign(persons_ + 1, Int(1));
    for (std::size_t i = persons_; i-- > 0;) denominators_[i] = denominators_[i + 1] * Int(n_ - i);
    const std::size_t cells = (persons_ + 1) * (k_ + 1) * (k_ + 1);
    value_.assign(cells, Int(0));
    choice_.assign(cells, 0);
    filled_.assign(cells, false);
  }

  WithinBucketSummary solve() {
    WithinBucketSummary out;
    out.max_atoms = k_;
    for (std::size_t h = 0; h <= k_; ++h) {
      const Int& scaled = search(0, h, h);
      out.minimum.push_back(Probability(to_integer(scaled), to_integer(denominators_[0])));
      AtomPartition p;
      std::size_t i = 0, cap = h, left = h;
      while (left > 0 && i < persons_) {
        std::size_t c = choice_[cell(i, cap, left)];
        if (c == 0) break;
        p.push_back(c);
        cap = c;
        left -= c;
        ++i;
      }
      out.partition.push_back(std::move(p));
    }
    out.memo_entries = entries_;
    return out;
  }

 private:
  std::size_t cell(std::size_t i, std::size_t cap, std::size_t left) const { return (i * (k_ + 1) + cap) * (k_ + 1) + left; }

  const Int& search(std::size_t i, std::size_t cap, std::size_t left) {
    const std::size_t c = cell(i, cap, left);
    if (filled_[c]) return value_[c];
    // using no further atoms leaves the remaining factors at 1
    Int best = denominators_[i];
    std::size_t best_choice = 0;
    if (i < persons_) {
      // ties go to the larger k_i, so witnesses mention as few persons as possible;
      // atoms on values absent from the bucket never help
      for (std::size_t ki = std::min({cap, left, distinct_}); ki >= 1; --ki) {
        const std::size_t excluded = prefix_[ki] + i;
        Int candidate(0);
        if (excluded < n_) {
          candidate = Int(n_ - excluded);
          candidate *= search(i + 1, ki, left - ki);
        }
        if (candidate < best) {
          best = candidate;
          best_choice = ki;
        }
      }
    }
    filled_[c] = true;
    ++entries_;
    value_[c] = best;
    choice_[c] = best_choice;
    return value_[c];
  }

  std::size_t n_;
  std::size_t k_;
  std::size_t persons_;
  std::size_t distinct_;
  std::vector<std::size_t> prefix_;
  std::vector<Int> denominators_;
  std::vector<Int> value_;
  std::vector<std::size_t> choice_;
  std::vector<bool> filled_;
  std::size_t entries_ = 0;
};

}  // namespace detail

/// Minimises Pr(no atom holds | B) over every set of h atoms about persons in
/// `bucket`, for all h <= max_atoms at once.
inline WithinBucketSummary summarize_bucket(const Bucket& bucket, std::size_t max_atoms) {
  const std::size_t persons = std::min(bucket.size(), max_atoms);
  // the largest intermediate is at most n_b^persons; keep a bit of headroom below 2^128
  const bool fits = persons == 0 || static_cast<double>(persons) * std::log2(static_cast<double>(bucket.size()) + 1.0) < 120.0;
  if (fits) return detail::WithinBucketSolver<unsigned __int128>(bucket, max_atoms).solve();
  return detail::WithinBucketSolver<Integer>(bucket, max_atoms).solve();
}

/// Minimum of Pr(and_i not A_i | B) over k atoms in one bucket, with a minimising partition.
inline std::pair<Probability, AtomPartition> minimize_within_bucket(const Bucket& bucket, std::size_t k) {
  auto summary = summarize_bucket(bucket, k);
  return {summary.minimum[k], summary.partition[k]};
}

// ---------------------------------------------------------------------------
// Across buckets
// ---------------------------------------------------------------------------

/// Where the minimising atoms live: `atoms[b]` antecedent atoms in bucket b, plus
/// the consequent A in `target_bucket`.
struct AtomPlacement {
  std::vector<std::size_t> atoms;
  std::size_t target_bucket = 0;
};

struct AcrossBucketsResult {
  ExtendedRatio ratio;  // never infinite for k >= 0 and a non-empty bucketization
  AtomPlacement placement;
  std::size_t memo_entries = 0;
};

struct EngineStats {
  std::size_t summaries_built = 0;   // per-bucket tables computed
  std::size_t summaries_reused = 0;  // per-bucket tables served from the cache
  std::size_t max_within_entries = 0;
  std::size_t within_entries = 0;    // summed over built tables
  std::size_t across_entries = 0;    // last across-bucket run
};

struct DisclosureReport {
  std::size_t k = 0;
  Probability disclosure;
  ExtendedRatio ratio;
  Atom target;                                 // the shared consequent A
  std::vector<Atom> antecedents;               // A_0 ... (at most k)
  AtomPlacement placement;
  std::vector<SimpleImplication> implications;  // exactly k, all with consequent A

  Knowledge witness() const {
    Knowledge out;
    for (const auto& imp : implications) out.add(imp);
    return out;
  }
};

/// Computes maximum disclosure; per-bucket tables are cached by bucket
/// histogram so that re-running on a bucketization that shares buckets with an
/// earlier one only pays for the new buckets.
class DisclosureEngine {
 public:
  const WithinBucketSummary& summary(const Bucket& bucket, std::size_t max_atoms) {
    Key key{max_atoms, bucket.size(), {}};
    for (const auto& e : bucket.histogram()) key.counts.push_back(e.count);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      ++stats_.summaries_reused;
      return *it->second;
    }
    auto s = std::make_shared<WithinBucketSummary>(summarize_bucket(bucket, max_atoms));
    ++stats_.summaries_built;
    stats_.within_entries += s->memo_entries;
    stats_.max_within_entries = std::max(stats_.max_within_entries, s->memo_entries);
    return *cache_.emplace(std::move(key), std::move(s)).first->second;
  }

  /// Minimises Pr(not A and_i not A_i | B) / Pr(A | B) over all atoms A, A_0..A_{k-1}.
  AcrossBucketsResult minimize_across_buckets(const Bucketization& b, std::size_t k) {
    const std::size_t nb = b.bucket_count();
    std::vector<const WithinBucketSummary*> tables(nb);
    std::vector<Rational> target_factor(nb);
    for (std::size_t i = 0; i < nb; ++i) {
      const Bucket& bucket = b.bucket(i);
      tables[i] = &summary(bucket, k + 1);
      target_factor[i] = Rational(Integer(bucket.size()), Integer(bucket.count_at_rank(0)));
    }

    // state (i, h, a): buckets i.. still to place h antecedent atoms; a = A already placed
    struct Cell {
      ExtendedRatio value;
      std::size_t here = 0;   // antecedent atoms placed in bucket i
      bool target_here = false;
    };
    const std::size_t width = k + 1;
    std::vector<Cell> memo((nb + 1) * width * 2);
    auto at = [&](std::size_t i, std::size_t h, bool a) -> Cell& { return memo[(i * width + h) * 2 + (a ? 1 : 0)]; };

    for (std::size_t h = 0; h <= k; ++h) {
      at(nb, h, true).value = h == 0 ? ExtendedRatio(Rational(1)) : std::nullopt;
      at(nb, h, false).value = std::nullopt;
    }
    auto improve = [](Cell& cell, Rational candidate, std::size_t here, bool target_here) {
      if (!cell.value || candidate < *cell.value) {
        cell.value = std::move(candidate);
        cell.here = here;
        cell.target_here = target_here;
      }
    };
    for (std::size_t i = nb; i-- > 0;) {
      const auto& within = tables[i]->minimum;
      for (std::size_t h = 0; h <= k; ++h) {
        for (int a = 1; a >= 0; --a) {
          Cell& cell = at(i, h, a == 1);
          for (std::size_t here = 0; here <= h; ++here) {
            const ExtendedRatio& placed = at(i + 1, h - here, true).value;
            if (a == 0) {
              // A in this bucket ...
              if (placed) improve(cell, within[here + 1] * *placed * target_factor[i], here, true);
              // ... or in a later one
              const ExtendedRatio& later = at(i + 1, h - here, false).value;
              if (later) improve(cell, within[here] * *later, here, false);
            } else if (placed) {
              improve(cell, within[here] * *placed, here, false);
            }
          }
        }
      }
    }

    AcrossBucketsResult result;
    result.memo_entries = memo.size();
    stats_.across_entries = memo.size();
    result.ratio = nb == 0 ? std::nullopt : at(0, k, false).value;
    if (!result.ratio) return result;
    result.placement.atoms.assign(nb, 0);
    std::size_t h = k;
    bool a = false;
    for (std::size_t i = 0; i < nb; ++i) {
      const Cell& cell = at(i, h, a);
      result.placement.atoms[i] = cell.here;
      if (cell.target_here) {
        result.placement.target_bucket = i;
        a = true;
      }
      h -= cell.here;
    }
    return result;
  }

  DisclosureReport max_disclosure(const Bucketization& b, std::size_t k) {
    AcrossBucketsResult across = minimize_across_buckets(b, k);
    if (!across.ratio) throw ValidationError("bucketization has no buckets");
    DisclosureReport report;
    report.k = k;
    report.ratio = across.ratio;
    report.disclosure = Probability(1) / (Probability(1) + *across.ratio);
    report.placement = across.placement;

    // Person j of a bucket (in member order) carries atoms on its k_j most
    // frequent values; the target bucket's first person's top value is A.
    const std::size_t tb = across.placement.target_bucket;
    const Bucket& target_bucket = b.bucket(tb);
    report.target = {b.persons()[target_bucket.members()[0]], b.domain()[target_bucket.histogram()[0].value]};
    for (std::size_t i = 0; i < b.bucket_count(); ++i) {
      const Bucket& bucket = b.bucket(i);
      const std::size_t atoms = across.placement.atoms[i] + (i == tb ? 1 : 0);
      if (atoms == 0) continue;
      const AtomPartition& part = summary(bucket, k + 1).partition[atoms];
      for (std::size_t person = 0; person < part.size(); ++person) {
        for (std::size_t rank = 0; rank < part[person]; ++rank) {
          if (i == tb && person == 0 && rank == 0) continue;
          report.antecedents.push_back(
              {b.persons()[bucket.members()[person]], b.domain()[bucket.histogram()[rank].value]});
        }
      }
    }
    for (const auto& a : report.antecedents) report.implications.push_back({a, report.target});
    // atoms that cannot lower the ratio further are spent on the tautology A -> A
    while (report.implications.size() < k) report.implications.push_back({report.target, report.target});
    return report;
  }

  const EngineStats& stats() const noexcept { return stats_; }

  void clear() {
    cache_.clear();
    stats_ = {};
  }

 private:
  struct Key {
    std::size_t max_atoms;
    std::size_t size;
    std::vector<std::size_t> counts;
    friend auto operator<=>(const Key&, const Key&) = default;
  };

  std::map<Key, std::shared_ptr<const WithinBucketSummary>> cache_;
  EngineStats stats_;
};

inline AcrossBucketsResult minimize_across_buckets(const Bucketization& b, std::size_t k) {
  DisclosureEngine engine;
  return engine.minimize_across_buckets(b, k);
}

/// Maximum over atoms and k implications of Pr(atom | B and knowledge), with a witness.
inline DisclosureReport max_disclosure(const Bucketization& b, std::size_t k) {
  DisclosureEngine engine;
  return engine.max_disclosure(b, k);
}

// ---------------------------------------------------------------------------
// Negated-atom baseline
// ---------------------------------------------------------------------------

struct NegationReport {
  std::size_t k = 0;
  Probability disclosure;
  Atom target;
  std::vector<Atom> negated;  // atoms known to be false

  /// The negations encoded as implications; requires a domain of at least two values.
  Knowledge witness(const std::vector<std::string>& domain) const {
    Knowledge out;
    for (const auto& a : negated) out.add(negation_as_implication(a, domain));
    return out;
  }
};

/// Worst case over k negated atoms. All negations fall on one person: for target
/// rank m <= k the k most frequent other values are excluded, giving
/// n_b(s^m) / (n_b - sum_{j <= k, j != m} n_b(s^j)).
inline NegationReport worst_case_negations(const Bucketization& b, std::size_t k) {
  NegationReport best;
  best.k = k;
  bool found = false;
  std::size_t best_bucket = 0, best_rank = 0;
  for (std::size_t bi = 0; bi < b.bucket_count(); ++bi) {
    const Bucket& bucket = b.bucket(bi);
    std::size_t top = 0;
    for (std::size_t j = 0; j <= k && j < bucket.distinct(); ++j) top += bucket.count_at_rank(j);
    for (std::size_t m = 0; m <= k && m < bucket.distinct(); ++m) {
      const std::size_t hit = bucket.count_at_rank(m);
      Probability p(Integer(hit), Integer(bucket.size() - (top - hit)));
      if (!found || p > best.disclosure) {
        found = true;
        best.disclosure = p;
        best_bucket = bi;
        best_rank = m;
      }
    }
  }
  if (!found) throw ValidationError("bucketization has no buckets");

  const Bucket& bucket = b.bucket(best_bucket);
  const std::string& person = b.persons()[bucket.members()[0]];
  best.target = {person, b.domain()[bucket.histogram()[best_rank].value]};
  for (std::size_t j = 0; j <= k && j < bucket.distinct(); ++j)
    if (j != best_rank) best.negated.push_back({person, b.domain()[bucket.histogram()[j].value]});
  // pad with values absent from the bucket (always false), then repeats
  for (std::size_t v = 0; v < b.domain().size() && best.negated.size() < k; ++v)
    if (bucket.count_of(v) == 0) best.negated.push_back({person, b.domain()[v]});
  while (!best.negated.empty() && best.negated.size() < k) best.negated.push_back(best.negated.front());
  return best;
}

inline Probability max_disclosure_negated_atoms(const Bucketization& b, std::size_t k) {
  return worst_case_negations(b, k).disclosure;
}

}  // namespace wcd

#endif  // WCD_DISCLOSURE_HPP
