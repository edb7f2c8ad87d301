#ifndef WCD_TABLE_HPP
#define WCD_TABLE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "wcd/errors.hpp"

namespace wcd {

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace csv {

/// Reads comma-separated rows. Quoted fields may contain commas, doubled quotes
/// and newlines. A trailing newline does not produce an empty row.
inline std::vector<std::vector<std::string>> read(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  char c;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) throw ParseError("quote inside unquoted field", line, row.size() + 1);
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field", line, row.size() + 1);
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

inline std::string quote(std::string_view field) {
  bool needs = field.find_first_of(",\"\n\r") != std::string_view::npos ||
               (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << quote(row[i]);
  }
  out << '\n';
}

}  // namespace csv

// ---------------------------------------------------------------------------
// Table
// ---------------------------------------------------------------------------

/// How to interpret the columns of a CSV table.
struct SchemaDescriptor {
  std::string sensitive;
  std::optional<std::string> id_column;
  /// Sensitive values to include in the domain even if no record carries them.
  std::vector<std::string> declared_domain;
};

struct Record {
  std::string person;
  std::vector<std::string> attributes;  // parallel to Table::attributes()
  std::string sensitive;
};

/// Person-indexed microdata with one sensitive attribute. Immutable once built.
class Table {
 public:
  Table(std::vector<std::string> attributes, std::string sensitive_name, std::vector<Record> records,
        std::vector<std::string> declared_domain = {}, std::optional<std::string> id_column = std::nullopt,
        std::vector<std::string> header = {})
      : attributes_(std::move(attributes)),
        sensitive_name_(std::move(sensitive_name)),
        id_column_(std::move(id_column)),
        header_(std::move(header)),
        records_(std::move(records)) {
    if (records_.empty()) throw ValidationError("table has no records");
    for (std::size_t i = 0; i < records_.size(); ++i) {
      const auto& r = records_[i];
      if (r.person.empty()) throw ValidationError("empty person id in record " + std::to_string(i));
      if (r.attributes.size() != attributes_.size())
        throw ValidationError("record for '" + r.person + "' does not supply every attribute");
      if (!index_.emplace(r.person, i).second) throw ValidationError("duplicate person id '" + r.person + "'");
      domain_.push_back(r.sensitive);
    }
    for (const auto& v : declared_domain) domain_.push_back(v);
    std::sort(domain_.begin(), domain_.end());
    domain_.erase(std::unique(domain_.begin(), domain_.end()), domain_.end());
    if (header_.empty()) {
      if (id_column_) header_.push_back(*id_column_);
      header_.insert(header_.end(), attributes_.begin(), attributes_.end());
      header_.push_back(sensitive_name_);
    }
  }

  const std::vector<std::string>& attributes() const noexcept { return attributes_; }
  const std::string& sensitive_name() const noexcept { return sensitive_name_; }
  const std::optional<std::string>& id_column() const noexcept { return id_column_; }
  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<Record>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  const Record& record(std::size_t i) const { return records_.at(i); }

  /// Sensitive domain, sorted lexicographically. This is the canonical value order.
  const std::vector<std::string>& domain() const noexcept { return domain_; }

  std::optional<std::size_t> person_index(std::string_view person) const {
    auto it = index_.find(std::string(person));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::size_t> attribute_index(std::string_view name) const {
    auto it = std::find(attributes_.begin(), attributes_.end(), name);
    if (it == attributes_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - attributes_.begin());
  }

  std::optional<std::size_t> value_index(std::string_view value) const {
    auto it = std::lower_bound(domain_.begin(), domain_.end(), value);
    if (it == domain_.end() || *it != value) return std::nullopt;
    return static_cast<std::size_t>(it - domain_.begin());
  }

  /// Sensitive value index of person `i`.
  std::size_t sensitive_index(std::size_t i) const { return *value_index(records_.at(i).sensitive); }

  friend bool operator==(const Table& a, const Table& b) {
    if (a.attributes_ != b.attributes_ || a.sensitive_name_ != b.sensitive_name_ || a.domain_ != b.domain_ ||
        a.header_ != b.header_ || a.records_.size() != b.records_.size())
      return false;
    for (std::size_t i = 0; i < a.records_.size(); ++i) {
      const auto& x = a.records_[i];
      const auto& y = b.records_[i];
      if (x.person != y.person || x.attributes != y.attributes || x.sensitive != y.sensitive) return false;
    }
    return true;
  }

 private:
  std::vector<std::string> attributes_;
  std::string sensitive_name_;
  std::optional<std::string> id_column_;
  std::vector<std::string> header_;
  std::vector<Record> records_;
  std::vector<std::string> domain_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Parses a CSV table. Without an id column, persons are named by their 0-based row index.
inline Table load_table(std::istream& in, const SchemaDescriptor& schema) {
  auto rows = csv::read(in);
  if (rows.empty()) throw ValidationError("empty input: no header row");
  const auto& header = rows.front();
  auto column_of = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ValidationError("missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  std::size_t sensitive_col = column_of(schema.sensitive);
  std::optional<std::size_t> id_col;
  if (schema.id_column) id_col = column_of(*schema.id_column);
  if (id_col && *id_col == sensitive_col) throw ValidationError("id column cannot be the sensitive column");

  std::vector<std::size_t> attr_cols;
  std::vector<std::string> attributes;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == sensitive_col || (id_col && c == *id_col)) continue;
    attr_cols.push_back(c);
    attributes.push_back(header[c]);
  }

  std::vector<Record> records;
  records.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    if (row.size() != header.size())
      throw ValidationError("row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                            " fields, expected " + std::to_string(header.size()));
    Record rec;
    rec.person = id_col ? row[*id_col] : std::to_string(records.size());
    rec.sensitive = row[sensitive_col];
    for (auto c : attr_cols) rec.attributes.push_back(row[c]);
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw ValidationError("empty input: no records");
  return Table(std::move(attributes), schema.sensitive, std::move(records), schema.declared_domain,
               schema.id_column, header);
}

inline Table load_table(std::string_view text, const SchemaDescriptor& schema) {
  std::istringstream in{std::string(text)};
  return load_table(in, schema);
}

/// Writes the table back in its original column layout.
inline void write_table(std::ostream& out, const Table& table) {
  const auto& header = table.header();
  csv::write_row(out, header);
  for (const auto& rec : table.records()) {
    std::vector<std::string> row;
    row.reserve(header.size());
    std::size_t next_attr = 0;
    for (const auto& col : header) {
      if (table.id_column() && col == *table.id_column())
        row.push_back(rec.person);
      else if (col == table.sensitive_name())
        row.push_back(rec.sensitive);
      else
        row.push_back(rec.attributes.at(next_attr++));
    }
    csv::write_row(out, row);
  }
}

/// One sensitive value per non-empty line; surrounding whitespace is trimmed.
inline std::vector<std::string> read_domain_file(std::istream& in) {
  std::vector<std::string> values;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    values.push_back(line.substr(first, last - first + 1));
  }
  return values;
}

// ---------------------------------------------------------------------------
// Buckets
// ---------------------------------------------------------------------------

struct HistogramEntry {
  std::size_t value;  // index into the sensitive domain
  std::size_t count;

  friend bool operator==(const HistogramEntry&, const HistogramEntry&) = default;
};

/// A group of persons whose sensitive values are published as a permuted multiset.
class Bucket {
 public:
  Bucket(std::string id, std::vector<std::size_t> members, const std::vector<std::size_t>& values)
      : id_(std::move(id)), members_(std::move(members)) {
    if (members_.empty()) throw ValidationError("bucket '" + id_ + "' is empty");
    std::map<std::size_t, std::size_t> counts;
    for (auto m : members_) ++counts[values.at(m)];
    for (auto [v, c] : counts) histogram_.push_back({v, c});
    std::stable_sort(histogram_.begin(), histogram_.end(),
                     [](const HistogramEntry& a, const HistogramEntry& b) { return a.count > b.count; });
  }

  const std::string& id() const noexcept { return id_; }
  const std::vector<std::size_t>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }

  /// (value, count) pairs by count descending, ties by value ascending.
  const std::vector<HistogramEntry>& histogram() const noexcept { return histogram_; }
  std::size_t distinct() const noexcept { return histogram_.size(); }

  /// n_b(s_b^j); zero past the last distinct value.
  std::size_t count_at_rank(std::size_t j) const noexcept { return j < histogram_.size() ? histogram_[j].count : 0; }

  std::size_t count_of(std::size_t value) const noexcept {
    for (const auto& e : histogram_)
      if (e.value == value) return e.count;
    return 0;
  }

 private:
  std::string id_;
  std::vector<std::size_t> members_;
  std::vector<HistogramEntry> histogram_;
};

/// A partition of persons into buckets, together with the names needed to
/// interpret atoms. Immutable once built.
class Bucketization {
 public:
  /// `values[p]` is the domain index of person p's sensitive value; `bucket_ids[p]`
  /// names its bucket. Buckets are ordered by first appearance.
  Bucketization(std::vector<std::string> persons, std::vector<std::string> domain, std::vector<std::size_t> values,
                const std::vector<std::string>& bucket_ids)
      : persons_(std::move(persons)), domain_(std::move(domain)), values_(std::move(values)) {
    if (persons_.size() != values_.size() || persons_.size() != bucket_ids.size())
      throw ValidationError("bucketization inputs have mismatched lengths");
    if (domain_.empty()) throw ValidationError("sensitive domain is empty");
    if (!std::is_sorted(domain_.begin(), domain_.end()) ||
        std::adjacent_find(domain_.begin(), domain_.end()) != domain_.end())
      throw ValidationError("sensitive domain must be sorted and duplicate-free");
    std::unordered_map<std::string, std::size_t> order;
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::string> names;
    for (std::size_t p = 0; p < persons_.size(); ++p) {
      if (values_[p] >= domain_.size()) throw ValidationError("sensitive value index out of range");
      if (!person_index_.emplace(persons_[p], p).second)
        throw ValidationError("duplicate person id '" + persons_[p] + "'");
      auto [it, inserted] = order.emplace(bucket_ids[p], groups.size());
      if (inserted) {
        groups.emplace_back();
        names.push_back(bucket_ids[p]);
      }
      groups[it->second].push_back(p);
    }
    bucket_of_.assign(persons_.size(), 0);
    buckets_.reserve(groups.size());
    for (std::size_t b = 0; b < groups.size(); ++b) {
      for (auto p : groups[b]) bucket_of_[p] = b;
      buckets_.emplace_back(names[b], std::move(groups[b]), values_);
    }
  }

  /// Synthetic bucketization: each inner list is one bucket's sensitive values.
  /// Persons are named p0, p1, ... in bucket order; `extra_domain` widens the domain.
  static Bucketization from_values(const std::vector<std::vector<std::string>>& buckets,
                                   std::vector<std::string> extra_domain = {}) {
    std::vector<std::string> domain = std::move(extra_domain);
    for (const auto& b : buckets) domain.insert(domain.end(), b.begin(), b.end());
    std::sort(domain.begin(), domain.end());
    domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
    std::vector<std::string> persons, ids;
    std::vector<std::size_t> values;
    for (std::size_t b = 0; b < buckets.size(); ++b) {
      for (const auto& v : buckets[b]) {
        persons.push_back("p" + std::to_string(persons.size()));
        ids.push_back("b" + std::to_string(b));
        values.push_back(static_cast<std::size_t>(std::lower_bound(domain.begin(), domain.end(), v) - domain.begin()));
      }
    }
    return Bucketization(std::move(persons), std::move(domain), std::move(values), ids);
  }

  const std::vector<Bucket>& buckets() const noexcept { return buckets_; }
  std::size_t bucket_count() const noexcept { return buckets_.size(); }
  const Bucket& bucket(std::size_t b) const { return buckets_.at(b); }

  const std::vector<std::string>& persons() const noexcept { return persons_; }
  std::size_t person_count() const noexcept { return persons_.size(); }
  const std::vector<std::string>& domain() const noexcept { return domain_; }

  std::size_t bucket_of(std::size_t person) const { return bucket_of_.at(person); }

  /// True sensitive value of each person; only the oracle's tests and `holds` use it.
  std::size_t true_value(std::size_t person) const { return values_.at(person); }

  std::optional<std::size_t> person_index(std::string_view person) const {
    auto it = person_index_.find(std::string(person));
    if (it == person_index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::size_t> value_index(std::string_view value) const {
    auto it = std::lower_bound(domain_.begin(), domain_.end(), value);
    if (it == domain_.end() || *it != value) return std::nullopt;
    return static_cast<std::size_t>(it - domain_.begin());
  }

 private:
  std::vector<std::string> persons_;
  std::vector<std::string> domain_;
  std::vector<std::size_t> values_;
  std::vector<Bucket> buckets_;
  std::vector<std::size_t> bucket_of_;
  std::unordered_map<std::string, std::size_t> person_index_;
};

/// Explicit person -> bucket-id assignment.
using ExplicitAssignment = std::vector<std::pair<std::string, std::string>>;

/// Group persons by equal values on these non-sensitive attributes.
struct GroupBy {
  std::vector<std::string> attributes;
};

using Grouping = std::variant<ExplicitAssignment, GroupBy>;

/// Lines of `person-id<TAB>bucket-id`. Blank lines and `#` comments are skipped.
inline ExplicitAssignment read_partition_file(std::istream& in) {
  ExplicitAssignment out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected person-id<TAB>bucket-id", lineno, line.size() + 1);
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

inline void write_partition_file(std::ostream& out, const Bucketization& b) {
  for (const auto& bucket : b.buckets())
    for (auto p : bucket.members()) out << b.persons()[p] << '\t' << bucket.id() << '\n';
}

namespace detail {

inline std::vector<std::size_t> sensitive_indices(const Table& table) {
  std::vector<std::size_t> values(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) values[i] = table.sensitive_index(i);
  return values;
}

inline std::vector<std::string> person_ids(const Table& table) {
  std::vector<std::string> ids;
  ids.reserve(table.size());
  for (const auto& r : table.records()) ids.push_back(r.person);
  return ids;
}

}  // namespace detail

/// Builds a bucketization from an explicit assignment or a group-by attribute list.
/// Grouping by no attributes yields the single top bucket.
inline Bucketization partition(const Table& table, const Grouping& grouping) {
  std::vector<std::string> bucket_ids(table.size());
  if (const auto* assignment = std::get_if<ExplicitAssignment>(&grouping)) {
    std::vector<bool> seen(table.size(), false);
    for (const auto& [person, bucket] : *assignment) {
      auto idx = table.person_index(person);
      if (!idx) throw ValidationError("partition names unknown person '" + person + "'");
      if (seen[*idx]) throw ValidationError("partition assigns person '" + person + "' twice");
      seen[*idx] = true;
      bucket_ids[*idx] = bucket;
    }
    for (std::size_t i = 0; i < table.size(); ++i)
      if (!seen[i]) throw ValidationError("partition is missing person '" + table.record(i).person + "'");
  } else {
    const auto& by = std::get<GroupBy>(grouping).attributes;
    std::vector<std::size_t> cols;
    for (const auto& a : by) {
      auto c = table.attribute_index(a);
      if (!c) throw ValidationError("unknown attribute '" + a + "'");
      cols.push_back(*c);
    }
    for (std::size_t i = 0; i < table.size(); ++i) {
      std::string key;
      for (std::size_t j = 0; j < cols.size(); ++j) {
        if (j) key += '|';
        key += table.record(i).attributes[cols[j]];
      }
      bucket_ids[i] = cols.empty() ? std::string("*") : key;
    }
  }
  return Bucketization(detail::person_ids(table), table.domain(), detail::sensitive_indices(table), bucket_ids);
}

/// Shannon entropy (bits) of one bucket's sensitive distribution.
inline double bucket_entropy(const Bucket& bucket) {
  double h = 0.0;
  const double n = static_cast<double>(bucket.size());
  for (const auto& e : bucket.histogram()) {
    double p = static_cast<double>(e.count) / n;
    h -= p * std::log2(p);
  }
  return h == 0.0 ? 0.0 : h;  // normalise -0
}

/// Minimum over buckets of the sensitive-value entropy, in bits.
inline double min_bucket_entropy(const Bucketization& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& bucket : b.buckets()) best = std::min(best, bucket_entropy(bucket));
  return best;
}

}  // namespace wcd

#endif  // WCD_TABLE_HPP
