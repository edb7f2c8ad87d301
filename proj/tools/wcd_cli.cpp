// wcd: worst-case disclosure of a bucketized table.
//
//   wcd disclose  --table T.csv --sensitive Disease --id Name --partition P.tsv --k 2 --witness
//   wcd oracle    --table T.csv --sensitive Disease --id Name --group-by Sex --knowledge K.kb --target "Ed=Flu"
//   wcd anonymize --table T.csv --sensitive Disease --id Name --hierarchy H.json --c 7/10 --k 1 --all-minimal
//   wcd curve-k   --table T.csv --sensitive Disease --group-by Sex --k-max 6
//   wcd curve-entropy --bucket-size 14 --domain-size 14 --ks 0,1,2,4,8
//
// Exit codes: 0 success, 1 other failure, 2 invalid input, 3 budget exceeded, 4 no safe node.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <wcd/wcd.hpp>

namespace {

constexpr int kExitOther = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitBudget = 3;
constexpr int kExitNoSafeNode = 4;

struct GlobalOptions {
  std::string table;
  std::string sensitive;
  std::string id;
  std::string partition;
  std::vector<std::string> group_by;
  std::string domain;
  std::optional<std::uint64_t> budget;
  std::string out;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw wcd::ValidationError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

wcd::Table load(const GlobalOptions& g) {
  if (g.table.empty()) throw wcd::ValidationError("--table is required");
  if (g.sensitive.empty()) throw wcd::ValidationError("--sensitive is required");
  wcd::SchemaDescriptor schema{g.sensitive, {}, {}};
  if (!g.id.empty()) schema.id_column = g.id;
  if (!g.domain.empty()) {
    std::istringstream in(read_file(g.domain));
    schema.declared_domain = wcd::read_domain_file(in);
  }
  return wcd::load_table(read_file(g.table), schema);
}

wcd::Bucketization bucketize(const GlobalOptions& g, const wcd::Table& table) {
  if (!g.partition.empty() && !g.group_by.empty())
    throw wcd::ValidationError("give either --partition or --group-by, not both");
  if (!g.partition.empty()) {
    std::istringstream in(read_file(g.partition));
    return wcd::partition(table, wcd::read_partition_file(in));
  }
  if (!g.group_by.empty()) {
    for (const auto& a : g.group_by)
      if (!table.attribute_index(a)) throw wcd::ValidationError("unknown attribute '" + a + "' in --group-by");
    return wcd::partition(table, wcd::GroupBy{g.group_by});
  }
  throw wcd::ValidationError("a bucketization is required: pass --partition or --group-by");
}

/// Output goes to --out when given, else stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw wcd::ValidationError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? static_cast<std::ostream&>(*file_) : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw wcd::Error("failed to write output");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string show(const wcd::Rational& r) { return wcd::to_display_string(r); }

// ---------------------------------------------------------------------------

struct DiscloseOptions {
  std::size_t k = 0;
  std::string cls = "implications";
  bool witness = false;
};

int run_disclose(const GlobalOptions& g, const DiscloseOptions& o) {
  wcd::Table table = load(g);
  wcd::Bucketization b = bucketize(g, table);
  Output out(g.out);
  auto& os = out.stream();
  os << "k: " << o.k << "\n";
  os << "class: " << o.cls << "\n";
  if (o.cls == "implications") {
    wcd::DisclosureReport r = wcd::max_disclosure(b, o.k);
    os << "disclosure: " << show(r.disclosure) << "\n";
    os << "target: " << wcd::format_atom(r.target) << "\n";
    if (o.witness) os << "witness:\n" << wcd::format_knowledge(r.witness());
  } else {
    wcd::NegationReport r = wcd::worst_case_negations(b, o.k);
    os << "disclosure: " << show(r.disclosure) << "\n";
    os << "target: " << wcd::format_atom(r.target) << "\n";
    if (o.witness) os << "witness:\n" << wcd::format_knowledge(r.witness(b.domain()));
  }
  out.finish();
  return 0;
}

struct OracleCliOptions {
  std::string knowledge;
  std::string target;
};

int run_oracle(const GlobalOptions& g, const OracleCliOptions& o) {
  wcd::Table table = load(g);
  wcd::Bucketization b = bucketize(g, table);
  wcd::Knowledge k = o.knowledge.empty() ? wcd::Knowledge{} : wcd::parse_knowledge(read_file(o.knowledge));
  wcd::Atom target = wcd::parse_atom(o.target);
  wcd::OracleOptions options;
  if (g.budget) options.budget = *g.budget;
  wcd::Probability p = wcd::exact_posterior(b, k, target, options);
  Output out(g.out);
  out.stream() << "posterior: " << show(p) << "\n";
  out.finish();
  return 0;
}

struct AnonymizeOptions {
  std::string hierarchy;
  std::string c;
  std::size_t k = 0;
  bool all_minimal = false;
  std::string chain;
  std::string utility = "height";
};

int run_anonymize(const GlobalOptions& g, const AnonymizeOptions& o) {
  wcd::Table table = load(g);
  wcd::Hierarchy h = wcd::parse_hierarchy(read_file(o.hierarchy));
  wcd::SafetyThreshold threshold(wcd::parse_rational(o.c), o.k);
  Output out(g.out);
  auto& os = out.stream();

  std::vector<wcd::LatticeNode> candidates;
  if (!o.chain.empty()) {
    auto chain = wcd::parse_chain(o.chain, h);
    wcd::ChainSearchResult r = wcd::binary_search_chain(table, h, chain, threshold);
    os << "chain nodes: " << chain.size() << "\n";
    os << "probes: " << r.probes << "\n";
    if (r.node) candidates.push_back(*r.node);
  } else {
    wcd::LatticeSearchOptions options;
    if (g.budget) options.budget = static_cast<std::size_t>(*g.budget);
    wcd::LatticeSearchResult r = wcd::all_minimal_safe(table, h, threshold, options);
    os << "lattice nodes: " << wcd::lattice_size(h) << "\n";
    os << "evaluated: " << r.evaluated << "\n";
    candidates = r.minimal;
  }
  std::vector<std::string> names;
  for (const auto& a : h) names.push_back(a.attribute());
  os << "attributes: ";
  for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
  os << "\n";
  wcd::DisclosureEngine engine;
  for (const auto& n : candidates)
    os << "minimal safe: " << wcd::to_string(n) << " disclosure " << show(engine.max_disclosure(wcd::apply(table, h, n), o.k).disclosure)
       << "\n";
  if (candidates.empty()) {
    os << "no safe node\n";
    out.finish();
    return kExitNoSafeNode;
  }
  wcd::LatticeNode chosen = o.utility == "discernibility"
                                ? wcd::select_by_utility(candidates, table, h, wcd::DiscernibilityCost{})
                                : wcd::select_by_utility(candidates, table, h);
  wcd::Bucketization b = wcd::apply(table, h, chosen);
  os << "selected: " << wcd::to_string(chosen) << "\n";
  os << "buckets: " << b.bucket_count() << "\n";
  os << "disclosure: " << show(engine.max_disclosure(b, o.k).disclosure) << "\n";
  out.finish();
  return 0;
}

int run_curve_k(const GlobalOptions& g, std::size_t k_max) {
  wcd::Table table = load(g);
  wcd::Bucketization b = bucketize(g, table);
  Output out(g.out);
  wcd::emit_csv(wcd::disclosure_vs_k(b, k_max), out.stream());
  out.finish();
  return 0;
}

struct EntropyOptions {
  std::size_t bucket_size = 14;
  std::size_t domain_size = 14;
  std::vector<std::size_t> ks{0, 1, 2, 4, 8};
  std::string family = "skewed";
  std::string cls = "implications";
};

int run_curve_entropy(const GlobalOptions& g, const EntropyOptions& o) {
  wcd::EntropyFamily family{o.bucket_size, o.domain_size,
                            o.family == "all" ? wcd::EntropyFamily::Kind::all : wcd::EntropyFamily::Kind::skewed};
  auto cls = o.cls == "negations" ? wcd::CurveClass::negations : wcd::CurveClass::implications;
  auto points = wcd::entropy_vs_disclosure(family, o.ks, cls);
  Output out(g.out);
  wcd::emit_csv(points, out.stream());
  out.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worst-case disclosure of bucketized tables against k implications"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--table", g.table, "CSV table with a header row");
  app.add_option("--sensitive", g.sensitive, "Name of the sensitive column");
  app.add_option("--id", g.id, "Name of the person id column (default: 0-based row index)");
  app.add_option("--partition", g.partition, "Partition file: person-id<TAB>bucket-id per line");
  app.add_option("--group-by", g.group_by, "Bucket by equal values of these columns")->delimiter(',');
  app.add_option("--domain", g.domain, "File with one sensitive value per line, added to the domain");
  app.add_option("--budget", g.budget, "World budget for the oracle, node budget for the lattice");
  app.add_option("--out", g.out, "Write results to this file instead of stdout");

  DiscloseOptions disclose;
  auto* disclose_cmd = app.add_subcommand("disclose", "Maximum disclosure against k pieces of knowledge");
  disclose_cmd->add_option("--k", disclose.k, "Number of implications")->required();
  disclose_cmd->add_option("--class", disclose.cls, "implications or negations")
      ->check(CLI::IsMember({"implications", "negations"}));
  disclose_cmd->add_flag("--witness", disclose.witness, "Print the knowledge achieving the maximum");

  OracleCliOptions oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact posterior of an atom by world enumeration");
  oracle_cmd->add_option("--knowledge", oracle.knowledge, "Knowledge file, one implication per line");
  oracle_cmd->add_option("--target", oracle.target, "Atom person=value")->required();

  AnonymizeOptions anonymize;
  auto* anonymize_cmd = app.add_subcommand("anonymize", "Minimal (c,k)-safe full-domain generalizations");
  anonymize_cmd->add_option("--hierarchy", anonymize.hierarchy, "Hierarchy JSON")->required();
  anonymize_cmd->add_option("--c", anonymize.c, "Threshold as NUM/DEN or decimal")->required();
  anonymize_cmd->add_option("--k", anonymize.k, "Number of implications")->required();
  auto* all_flag = anonymize_cmd->add_flag("--all-minimal", anonymize.all_minimal, "Search the whole lattice (default)");
  auto* chain_opt = anonymize_cmd->add_option("--chain", anonymize.chain, "Chain such as Age=0..2,Zip=0..1");
  all_flag->excludes(chain_opt);
  anonymize_cmd->add_option("--utility", anonymize.utility, "height or discernibility")
      ->check(CLI::IsMember({"height", "discernibility"}));

  std::size_t k_max = 6;
  auto* curve_k_cmd = app.add_subcommand("curve-k", "CSV of maximum disclosure against k for both classes");
  curve_k_cmd->add_option("--k-max", k_max, "Largest k");

  EntropyOptions entropy;
  auto* curve_entropy_cmd =
      app.add_subcommand("curve-entropy", "CSV of least maximum disclosure against bucket entropy");
  curve_entropy_cmd->add_option("--bucket-size", entropy.bucket_size, "Tuples in the bucket");
  curve_entropy_cmd->add_option("--domain-size", entropy.domain_size, "Sensitive values available");
  curve_entropy_cmd->add_option("--ks", entropy.ks, "Values of k")->delimiter(',');
  curve_entropy_cmd->add_option("--family", entropy.family, "skewed or all")->check(CLI::IsMember({"skewed", "all"}));
  curve_entropy_cmd->add_option("--class", entropy.cls, "implications or negations")
      ->check(CLI::IsMember({"implications", "negations"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (disclose_cmd->parsed()) return run_disclose(g, disclose);
    if (oracle_cmd->parsed()) return run_oracle(g, oracle);
    if (anonymize_cmd->parsed()) return run_anonymize(g, anonymize);
    if (curve_k_cmd->parsed()) return run_curve_k(g, k_max);
    if (curve_entropy_cmd->parsed()) return run_curve_entropy(g, entropy);
  } catch (const wcd::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const wcd::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const wcd::InconsistentKnowledge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}
