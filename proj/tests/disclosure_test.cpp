#include <gtest/gtest.h>

#include "test_support.hpp"

namespace wcd {
namespace {

using testing::clinic_by_sex;
using testing::counted_all_false;

const Bucket& male_bucket(const Bucketization& b) { return b.bucket(0); }

TEST(ClosedForm, MaleBucketShapes) {
  Bucketization b = clinic_by_sex();
  const Bucket& m = male_bucket(b);  // counts 2, 2, 1 over n = 5
  EXPECT_EQ(closed_form_minimum(m, {}), Probability(1));
  EXPECT_EQ(closed_form_minimum(m, {1}), make_rational(3, 5));
  EXPECT_EQ(closed_form_minimum(m, {2}), make_rational(1, 5));
  EXPECT_EQ(closed_form_minimum(m, {1, 1}), make_rational(3, 10));
  EXPECT_EQ(closed_form_minimum(m, {2, 1}), make_rational(1, 10));
  EXPECT_EQ(closed_form_minimum(m, {3}), Probability(0));
  EXPECT_EQ(closed_form_minimum(m, {4}), Probability(0));
}

TEST(ClosedForm, AgreesWithWorldCounting) {
  Bucketization b = clinic_by_sex();
  const auto& d = b.domain();
  auto v = [&](const char* s) { return *b.value_index(s); };
  // Bob and Charlie each excluded from the top value: shape (1, 1)
  EXPECT_EQ(counted_all_false(b, {{0, v("Flu")}, {1, v("Flu")}}), make_rational(3, 10));
  // Bob excluded from the two top values: shape (2)
  EXPECT_EQ(counted_all_false(b, {{0, v("Flu")}, {0, v("Lung Cancer")}}), make_rational(1, 5));
  EXPECT_EQ(d.size(), 6u);
}

TEST(ClosedForm, InvalidPartitions) {
  Bucketization b = clinic_by_sex();
  EXPECT_THROW(closed_form_minimum(male_bucket(b), {1, 2}), ValidationError);
  EXPECT_THROW(closed_form_minimum(male_bucket(b), {1, 0}), ValidationError);
  EXPECT_THROW(closed_form_minimum(male_bucket(b), {1, 1, 1, 1, 1, 1}), ValidationError);
}

// Minimum of Pr(no atom holds) over every set of h feasible atoms in the bucket.
Probability brute_within(const Bucketization& b, std::size_t h) {
  std::vector<AtomRef> atoms;
  for (auto p : b.bucket(0).members())
    for (const auto& e : b.bucket(0).histogram()) atoms.push_back({p, e.value});
  Probability best = 1;
  std::vector<AtomRef> chosen;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    if (chosen.size() == h) {
      best = std::min(best, counted_all_false(b, chosen));
      return;
    }
    for (std::size_t i = from; i < atoms.size(); ++i) {
      chosen.push_back(atoms[i]);
      self(self, i + 1);
      chosen.pop_back();
    }
  };
  rec(rec, 0);
  return best;
}

TEST(WithinBucket, MatchesBruteForceOverAtomSets) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    Bucketization b = testing::random_bucketization(rng, 6, 1, 4);
    const std::size_t max_atoms = 3;
    WithinBucketSummary s = summarize_bucket(b.bucket(0), max_atoms);
    for (std::size_t h = 0; h <= max_atoms; ++h) {
      std::size_t feasible = b.bucket(0).size() * b.bucket(0).distinct();
      Probability expected = h <= feasible ? brute_within(b, h) : Probability(0);
      EXPECT_EQ(s.minimum[h], expected) << "trial " << trial << " h " << h;
      EXPECT_EQ(closed_form_minimum(b.bucket(0), s.partition[h]), s.minimum[h]);
      std::size_t used = 0;
      for (auto c : s.partition[h]) used += c;
      EXPECT_LE(used, h);
    }
  }
}

TEST(WithinBucket, MinimizeReturnsPartition) {
  Bucketization b = clinic_by_sex();
  auto [value, part] = minimize_within_bucket(male_bucket(b), 2);
  EXPECT_EQ(value, make_rational(1, 5));
  EXPECT_EQ(part, (AtomPartition{2}));
  auto [zero, full] = minimize_within_bucket(male_bucket(b), 3);
  EXPECT_EQ(zero, Probability(0));
  EXPECT_EQ(closed_form_minimum(male_bucket(b), full), Probability(0));
}

TEST(MaxDisclosure, ClinicGoldenValues) {
  Bucketization b = clinic_by_sex();
  EXPECT_EQ(max_disclosure(b, 0).disclosure, make_rational(2, 5));
  EXPECT_EQ(max_disclosure(b, 1).disclosure, make_rational(2, 3));
  EXPECT_EQ(max_disclosure(b, 2).disclosure, Probability(1));
  EXPECT_EQ(max_disclosure(b, 3).disclosure, Probability(1));
  EXPECT_EQ(*max_disclosure(b, 1).ratio, make_rational(1, 2));
  EXPECT_EQ(*max_disclosure(b, 2).ratio, Probability(0));
}

TEST(MaxDisclosure, WitnessIsSoundAndHasKImplications) {
  Bucketization b = clinic_by_sex();
  for (std::size_t k = 0; k <= 6; ++k) {
    DisclosureReport r = max_disclosure(b, k);
    ASSERT_EQ(r.implications.size(), k);
    for (const auto& imp : r.implications) EXPECT_EQ(imp.consequent, r.target);
    EXPECT_EQ(exact_posterior(b, r.witness(), r.target), r.disclosure) << "k " << k;
  }
}

TEST(MaxDisclosure, MatchesBruteForceOnRandomInstances) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    Bucketization b = testing::random_bucketization(rng, 6, 3, 3);
    for (std::size_t k = 0; k <= 2; ++k) {
      DisclosureReport r = max_disclosure(b, k);
      EXPECT_EQ(r.disclosure, brute_force_max_disclosure(b, k, KnowledgeClass::simple).disclosure) << trial << " " << k;
      EXPECT_EQ(exact_posterior(b, r.witness(), r.target), r.disclosure);
    }
  }
}

TEST(MaxDisclosure, SingleBucketSaturatesAtDistinctMinusOne) {
  for (std::size_t m = 1; m <= 6; ++m) {
    std::vector<std::string> values;
    for (std::size_t v = 0; v < m; ++v) values.insert(values.end(), 1 + v % 2, std::string(1, 'a' + v));
    Bucketization b = Bucketization::from_values({values});
    for (std::size_t k = 0; k + 1 < m; ++k) EXPECT_LT(max_disclosure(b, k).disclosure, Probability(1));
    EXPECT_EQ(max_disclosure(b, m - 1).disclosure, Probability(1));
  }
}

TEST(MaxDisclosure, KZeroIsLargestBucketFrequency) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    Bucketization b = testing::random_bucketization(rng, 12, 4, 5);
    Probability expected = 0;
    for (const auto& bucket : b.buckets())
      expected = std::max(expected, make_rational(bucket.count_at_rank(0), bucket.size()));
    EXPECT_EQ(max_disclosure(b, 0).disclosure, expected);
  }
}

TEST(MaxDisclosure, MonotoneInK) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    Bucketization b = testing::random_bucketization(rng, 20, 4, 6);
    DisclosureEngine engine;
    Probability prev = 0;
    for (std::size_t k = 0; k <= 8; ++k) {
      Probability d = engine.max_disclosure(b, k).disclosure;
      EXPECT_GE(d, prev);
      prev = d;
    }
  }
}

TEST(MaxDisclosure, SingletonBucketsDiscloseEverything) {
  Bucketization b = Bucketization::from_values({{"a"}, {"b"}, {"c"}});
  EXPECT_EQ(max_disclosure(b, 0).disclosure, Probability(1));
}

TEST(MaxDisclosure, EmptyBucketizationRejected) {
  Bucketization b = Bucketization::from_values({}, {"a"});
  EXPECT_THROW(max_disclosure(b, 1), ValidationError);
  EXPECT_THROW(worst_case_negations(b, 1), ValidationError);
}

TEST(Engine, ReusesSummariesForRepeatedHistograms) {
  DisclosureEngine engine;
  Bucketization first = Bucketization::from_values({{"a", "a", "b"}, {"c", "d"}});
  Bucketization second = Bucketization::from_values({{"x", "y", "y"}, {"e", "e", "f", "g"}});
  engine.max_disclosure(first, 3);
  EXPECT_EQ(engine.stats().summaries_built, 2u);
  const std::size_t reused = engine.stats().summaries_reused;  // witness reconstruction looks tables up again
  engine.max_disclosure(second, 3);
  EXPECT_EQ(engine.stats().summaries_built, 3u);  // counts (2,1) over 3 already known
  EXPECT_GE(engine.stats().summaries_reused, reused + 1);
  EXPECT_EQ(engine.max_disclosure(second, 3).disclosure, max_disclosure(second, 3).disclosure);
  engine.clear();
  EXPECT_EQ(engine.stats().summaries_built, 0u);
}

TEST(Engine, MemoSizesArePolynomial) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    Bucketization b = testing::random_bucketization(rng, 60, 6, 10);
    for (std::size_t k : {1u, 4u, 9u}) {
      DisclosureEngine engine;
      engine.max_disclosure(b, k);
      const std::size_t kk = k + 2;
      EXPECT_LE(engine.stats().max_within_entries, kk * kk * kk);
      EXPECT_LE(engine.stats().across_entries, 2 * (b.bucket_count() + 1) * (k + 1));
    }
  }
}

TEST(Negations, ClinicGoldenValues) {
  Bucketization b = clinic_by_sex();
  EXPECT_EQ(max_disclosure_negated_atoms(b, 0), make_rational(2, 5));
  EXPECT_EQ(max_disclosure_negated_atoms(b, 1), make_rational(2, 3));
  EXPECT_EQ(max_disclosure_negated_atoms(b, 2), Probability(1));
  NegationReport r = worst_case_negations(b, 1);
  EXPECT_EQ(r.negated.size(), 1u);
  EXPECT_EQ(exact_posterior(b, r.witness(b.domain()), r.target), r.disclosure);
}

TEST(Negations, MatchBruteForceAndStayBelowImplications) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 40; ++trial) {
    Bucketization b = testing::random_bucketization(rng, 6, 3, 4);
    if (b.domain().size() < 2) continue;
    for (std::size_t k = 0; k <= 2; ++k) {
      NegationReport r = worst_case_negations(b, k);
      EXPECT_EQ(r.disclosure, brute_force_max_disclosure(b, k, KnowledgeClass::negated_atoms).disclosure);
      EXPECT_LE(r.disclosure, max_disclosure(b, k).disclosure);
      EXPECT_EQ(r.negated.size(), k);
      EXPECT_EQ(exact_posterior(b, r.witness(b.domain()), r.target), r.disclosure);
    }
  }
}

}  // namespace
}  // namespace wcd
