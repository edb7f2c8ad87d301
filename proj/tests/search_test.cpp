#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace wcd {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Hierarchy clinic_hierarchy() { return parse_hierarchy(read_file(std::string(WCD_DATA_DIR) + "/clinic_hierarchy.json")); }

TEST(Hierarchy, ParsesClinicFile) {
  Hierarchy h = clinic_hierarchy();
  ASSERT_EQ(h.size(), 3u);
  EXPECT_EQ(h[0].attribute(), "Zip");
  EXPECT_EQ(h[0].height(), 1u);
  EXPECT_EQ(h[1].height(), 2u);
  EXPECT_EQ(h[2].height(), 1u);
  EXPECT_EQ(h[1].generalize("23", 0), "23");
  EXPECT_EQ(h[1].generalize("23", 1), "2*");
  EXPECT_EQ(h[1].generalize("23", 2), "*");
  EXPECT_THROW(h[1].generalize("23", 3), ValidationError);
  EXPECT_THROW(h[1].generalize("99", 1), ValidationError);
  EXPECT_EQ(lattice_size(h), 12u);
  EXPECT_EQ(top_node(h), (LatticeNode{{1, 2, 1}}));
}

TEST(Hierarchy, RejectsMalformedInput) {
  EXPECT_THROW(parse_hierarchy("not json"), ValidationError);
  EXPECT_THROW(parse_hierarchy("{}"), ValidationError);
  EXPECT_THROW(parse_hierarchy(R"({"attributes":[{"levels":[]}]})"), ValidationError);
  EXPECT_THROW(parse_hierarchy(R"({"attributes":[{"name":"A"},{"name":"A"}]})"), ValidationError);
  EXPECT_THROW(parse_hierarchy(R"({"attributes":[{"name":"A","levels":[3]}]})"), ValidationError);
  EXPECT_THROW(parse_hierarchy(R"({"attributes":[{"name":"A","levels":[{}]}]})"), ValidationError);
  // top level with two labels
  EXPECT_THROW(parse_hierarchy(R"({"attributes":[{"name":"A","levels":[{"1":"x","2":"y"}]}]})"), ValidationError);
  // level 1 does not refine level 2
  EXPECT_THROW(parse_hierarchy(R"({"attributes":[{"name":"A","levels":[
      {"1":"x","2":"x","3":"y"}, {"1":"p","2":"q","3":"q"}, "suppress"]}]})"),
               ValidationError);
  EXPECT_NO_THROW(parse_hierarchy(R"({"attributes":[{"name":"A","levels":[
      {"1":"x","2":"x","3":"y"}, {"1":"p","2":"p","3":"p"}]}]})"));
}

TEST(Lattice, NodesOrderedByHeight) {
  Hierarchy h = clinic_hierarchy();
  auto nodes = lattice_nodes(h);
  ASSERT_EQ(nodes.size(), 12u);
  EXPECT_EQ(nodes.front(), bottom_node(h));
  EXPECT_EQ(nodes.back(), top_node(h));
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    EXPECT_LE(nodes[i - 1].height(), nodes[i].height());
    if (nodes[i - 1].height() == nodes[i].height()) EXPECT_LT(nodes[i - 1], nodes[i]);
  }
  EXPECT_THROW(check_node(h, {{0, 3, 0}}), ValidationError);
  EXPECT_THROW(check_node(h, {{0, 0}}), ValidationError);
  EXPECT_EQ(to_string(LatticeNode{{1, 0, 2}}), "(1,0,2)");
}

TEST(Apply, ClinicNodes) {
  Table t = testing::clinic_table();
  Hierarchy h = clinic_hierarchy();
  EXPECT_EQ(apply(t, h, top_node(h)).bucket_count(), 1u);
  EXPECT_EQ(apply(t, h, bottom_node(h)).bucket_count(), 10u);  // ages are all distinct within zip and sex
  Bucketization by_sex = apply(t, h, {{1, 2, 0}});
  EXPECT_EQ(by_sex.bucket_count(), 2u);
  EXPECT_EQ(max_disclosure(by_sex, 1).disclosure, make_rational(2, 3));
  EXPECT_TRUE(leq(apply(t, h, bottom_node(h)), by_sex));
  EXPECT_TRUE(leq(by_sex, apply(t, h, top_node(h))));
  EXPECT_FALSE(leq(apply(t, h, top_node(h)), by_sex));
}

TEST(Apply, UnknownAttribute) {
  Table t = testing::clinic_table();
  Hierarchy h = parse_hierarchy(R"({"attributes":[{"name":"Height","levels":["suppress"]}]})");
  EXPECT_THROW(apply(t, h, {{0}}), ValidationError);
}

TEST(Safety, ThresholdIsStrict) {
  Bucketization b = testing::clinic_by_sex();
  EXPECT_FALSE(is_safe(b, {make_rational(2, 3), 1}));
  EXPECT_TRUE(is_safe(b, {make_rational(7, 10), 1}));
  EXPECT_FALSE(is_safe(b, {Rational(1), 2}));
  EXPECT_THROW(SafetyThreshold(Rational(2), 1), ValidationError);
  EXPECT_THROW(SafetyThreshold(Rational(-1), 1), ValidationError);
}

TEST(Safety, MonotoneAlongGeneralization) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = testing::random_lattice_instance(rng, 3, 12, 4);
    auto nodes = lattice_nodes(inst.hierarchy);
    for (std::size_t k = 0; k <= 2; ++k) {
      std::vector<Probability> d;
      for (const auto& n : nodes) d.push_back(max_disclosure(apply(inst.table, inst.hierarchy, n), k).disclosure);
      for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = 0; j < nodes.size(); ++j)
          if (componentwise_leq(nodes[i], nodes[j])) EXPECT_GE(d[i], d[j]);
    }
  }
}

TEST(ChainSearch, ParsesChains) {
  Hierarchy h = clinic_hierarchy();
  auto chain = parse_chain("Age=0..2,Sex=1", h);
  ASSERT_EQ(chain.size(), 3u);
  EXPECT_EQ(chain[0], (LatticeNode{{0, 0, 1}}));
  EXPECT_EQ(chain[2], (LatticeNode{{0, 2, 1}}));
  auto two = parse_chain("Zip=0..1,Age=0..2", h);
  ASSERT_EQ(two.size(), 4u);
  EXPECT_EQ(two[1], (LatticeNode{{1, 0, 0}}));
  EXPECT_EQ(two[3], (LatticeNode{{1, 2, 0}}));
  EXPECT_THROW(parse_chain("Weight=0..1", h), ValidationError);
  EXPECT_THROW(parse_chain("Age=2..1", h), ValidationError);
  EXPECT_THROW(parse_chain("Age=0..5", h), ValidationError);
  EXPECT_THROW(parse_chain("Age", h), ValidationError);
  EXPECT_THROW(parse_chain("Age=x", h), ValidationError);
}

TEST(ChainSearch, FindsLowestSafeNode) {
  Table t = testing::clinic_table();
  Hierarchy h = clinic_hierarchy();
  auto chain = parse_chain("Age=0..2,Zip=0..1,Sex=0..1", h);
  ChainSearchResult r = binary_search_chain(t, h, chain, {make_rational(7, 10), 1});
  ASSERT_TRUE(r.node);
  for (std::size_t i = 0; i < chain.size(); ++i)
    EXPECT_EQ(is_safe(apply(t, h, chain[i]), {make_rational(7, 10), 1}), i >= *r.index);
  EXPECT_LE(r.probes, 3u);
  ChainSearchResult none = binary_search_chain(t, h, chain, {Rational(0), 0});
  EXPECT_FALSE(none.node);
  std::vector<LatticeNode> unordered{{{1, 0, 0}}, {{0, 1, 0}}};
  EXPECT_THROW(binary_search_chain(t, h, unordered, {Rational(1), 0}), ValidationError);
}

TEST(LatticeSearch, MatchesExhaustiveSweep) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 40; ++trial) {
    auto inst = testing::random_lattice_instance(rng, 3, 12, 4);
    for (std::size_t k = 0; k <= 2; ++k) {
      for (auto c : {make_rational(1, 2), make_rational(3, 4), Rational(1)}) {
        SafetyThreshold th{c, k};
        auto expected = testing::exhaustive_minimal_safe(inst.table, inst.hierarchy, th);
        auto plain = all_minimal_safe(inst.table, inst.hierarchy, th);
        EXPECT_EQ(plain.minimal, expected);
        EXPECT_LE(plain.evaluated, lattice_size(inst.hierarchy));
        EXPECT_EQ(all_minimal_safe(inst.table, inst.hierarchy, th, {100000, true}).minimal, expected);
      }
    }
  }
}

TEST(LatticeSearch, ClinicMinimalNodes) {
  Table t = testing::clinic_table();
  Hierarchy h = clinic_hierarchy();
  SafetyThreshold th{make_rational(7, 10), 1};
  auto r = all_minimal_safe(t, h, th);
  EXPECT_EQ(r.minimal, testing::exhaustive_minimal_safe(t, h, th));
  EXPECT_FALSE(r.minimal.empty());
  EXPECT_THROW(all_minimal_safe(t, h, th, {11, false}), BudgetExceeded);
  EXPECT_TRUE(all_minimal_safe(t, h, {Rational(0), 0}).minimal.empty());
}

TEST(Utility, HeightThenLexicographic) {
  Table t = testing::clinic_table();
  Hierarchy h = clinic_hierarchy();
  std::vector<LatticeNode> nodes{{{1, 2, 0}}, {{0, 2, 1}}, {{1, 1, 1}}};
  EXPECT_EQ(select_by_utility(nodes, t, h), (LatticeNode{{0, 2, 1}}));
  EXPECT_THROW(select_by_utility({}, t, h), ValidationError);
  // discernibility: (1,2,0) gives two buckets of 5 = 50; (0,2,1) gives zips 14850 x6, 14853 x4 = 52
  EXPECT_EQ(DiscernibilityCost{}(nodes[0], t, h), Rational(50));
  EXPECT_EQ(DiscernibilityCost{}(nodes[1], t, h), Rational(52));
  EXPECT_EQ(select_by_utility(nodes, t, h, DiscernibilityCost{}), (LatticeNode{{1, 2, 0}}));
}

// Ages 0..15, one tuple each; level j groups ages by age >> j, level 5 suppresses.
// Sensitive value cycles with period 8, so buckets reach 8 distinct values at level 3.
struct AgeChain {
  Table table;
  Hierarchy hierarchy;
};

AgeChain age_chain() {
  std::string csv = "Id,Age,S\n";
  for (int a = 0; a < 16; ++a) csv += "p" + std::to_string(a) + "," + std::to_string(a) + ",s" + std::to_string(a % 8) + "\n";
  std::vector<GeneralizationLevel> levels;
  for (int j = 1; j <= 4; ++j) {
    GeneralizationLevel l;
    for (int a = 0; a < 16; ++a) l.labels[std::to_string(a)] = "g" + std::to_string(a >> j);
    levels.push_back(l);
  }
  levels.push_back({true, {}});
  return {load_table(csv, {"S", "Id", {}}), {AttributeHierarchy("Age", levels)}};
}

TEST(ChainSearch, SixLevelAgeChainStopsAtLevelThree) {
  AgeChain c = age_chain();
  SafetyThreshold th{make_rational(1, 5), 0};
  auto chain = parse_chain("Age=0..5", c.hierarchy);
  ASSERT_EQ(chain.size(), 6u);
  for (std::size_t level = 0; level < chain.size(); ++level)
    EXPECT_EQ(is_safe(apply(c.table, c.hierarchy, chain[level]), th), level >= 3) << level;
  ChainSearchResult r = binary_search_chain(c.table, c.hierarchy, chain, th);
  ASSERT_TRUE(r.index);
  EXPECT_EQ(*r.index, 3u);
  EXPECT_EQ(*r.node, (LatticeNode{{3}}));
}

// A is suppressed at level 1; B pairs {0,1},{2,3} at level 1 and is suppressed at level 2.
Hierarchy ab_hierarchy() {
  return parse_hierarchy(R"({"attributes":[
      {"name":"A","levels":["suppress"]},
      {"name":"B","levels":[{"0":"lo","1":"lo","2":"hi","3":"hi"},"suppress"]}]})");
}

TEST(LatticeSearch, TwoIncomparableMinimalNodes) {
  Table t = load_table(
      "Id,A,B,S\n"
      "1,0,0,x\n2,0,1,x\n3,0,2,y\n4,0,3,z\n"
      "5,1,0,y\n6,1,1,z\n7,1,2,x\n8,1,3,x\n",
      {"S", "Id", {}});
  Hierarchy h = ab_hierarchy();
  SafetyThreshold th{Rational(1), 0};
  EXPECT_FALSE(is_safe(apply(t, h, {{0, 0}}), th));
  EXPECT_FALSE(is_safe(apply(t, h, {{0, 1}}), th));
  auto r = all_minimal_safe(t, h, th);
  EXPECT_EQ(r.minimal, (std::vector<LatticeNode>{{{0, 2}}, {{1, 0}}}));
  EXPECT_EQ(r.minimal, testing::exhaustive_minimal_safe(t, h, th));
  EXPECT_EQ(select_by_utility(r.minimal, t, h), (LatticeNode{{1, 0}}));
}

TEST(LatticeSearch, MixedBottomIsTheOnlyMinimalNode) {
  Table t = load_table("Id,A,B,S\n1,0,0,x\n2,0,0,y\n3,1,3,x\n4,1,3,y\n", {"S", "Id", {}});
  Hierarchy h = ab_hierarchy();
  auto r = all_minimal_safe(t, h, {Rational(1), 0});
  EXPECT_EQ(r.minimal, (std::vector<LatticeNode>{bottom_node(h)}));
  EXPECT_EQ(r.evaluated, 1u);
}

TEST(LatticeSearch, PureBottomForcesClimb) {
  Table t = load_table("Id,A,B,S\n1,0,0,x\n2,1,0,y\n3,0,2,x\n4,1,2,y\n", {"S", "Id", {}});
  Hierarchy h = ab_hierarchy();
  auto r = all_minimal_safe(t, h, {Rational(1), 0});
  EXPECT_FALSE(std::count(r.minimal.begin(), r.minimal.end(), bottom_node(h)));
  // grouping by A alone keeps both x tuples together, so only B's buckets mix
  EXPECT_EQ(r.minimal, (std::vector<LatticeNode>{{{1, 0}}}));
  EXPECT_EQ(r.minimal, testing::exhaustive_minimal_safe(t, h, {Rational(1), 0}));
}

TEST(Utility, SingleCandidateAndCostOrder) {
  Table t = testing::clinic_table();
  Hierarchy h = clinic_hierarchy();
  std::vector<LatticeNode> one{{{1, 1, 0}}};
  EXPECT_EQ(select_by_utility(one, t, h), one[0]);
  std::vector<LatticeNode> two{{{0, 2, 0}}, {{1, 0, 0}}};
  EXPECT_EQ(select_by_utility(two, t, h), (LatticeNode{{1, 0, 0}}));
}

}  // namespace
}  // namespace wcd
