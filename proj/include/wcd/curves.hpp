#ifndef WCD_CURVES_HPP
#define WCD_CURVES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "wcd/disclosure.hpp"
#include "wcd/errors.hpp"
#include "wcd/rational.hpp"
#include "wcd/table.hpp"

namespace wcd {

enum class CurveClass { implications, negations };

inline const char* to_string(CurveClass c) { return c == CurveClass::implications ? "implications" : "negations"; }

struct CurvePoint {
  std::string series;
  double x = 0.0;  // k, or minimum bucket entropy in bits
  Probability disclosure;
};

/// Maximum disclosure for k = 0..k_max, for implications and for negated atoms.
inline std::vector<CurvePoint> disclosure_vs_k(const Bucketization& b, std::size_t k_max) {
  std::vector<CurvePoint> out;
  DisclosureEngine engine;
  for (std::size_t k = 0; k <= k_max; ++k) {
    out.push_back({to_string(CurveClass::implications), static_cast<double>(k), engine.max_disclosure(b, k).disclosure});
    out.push_back({to_string(CurveClass::negations), static_cast<double>(k), max_disclosure_negated_atoms(b, k)});
  }
  return out;
}

/// Single-bucket tables of a fixed size over a fixed domain.
struct EntropyFamily {
  enum class Kind {
    skewed,  // one dominant value, the rest spread evenly; one table per dominant count
    all,     // every histogram of the bucket size with at most domain_size values
  };
  std::size_t bucket_size = 14;
  std::size_t domain_size = 14;
  Kind kind = Kind::skewed;
};

/// Histograms (counts, non-increasing) of the family.
inline std::vector<std::vector<std::size_t>> family_histograms(const EntropyFamily& f) {
  if (f.bucket_size == 0 || f.domain_size == 0) throw ValidationError("entropy family needs a non-empty bucket and domain");
  std::vector<std::vector<std::size_t>> out;
  const std::size_t n = f.bucket_size, m = f.domain_size;
  if (f.kind == EntropyFamily::Kind::skewed) {
    for (std::size_t top = n; top >= 1; --top) {
      std::vector<std::size_t> h{top};
      std::size_t rest = n - top;
      if (rest > 0) {
        if (m < 2) break;
        std::size_t q = rest / (m - 1), r = rest % (m - 1);
        if (q + (r ? 1 : 0) > top) break;
        for (std::size_t j = 0; j < m - 1; ++j) {
          std::size_t c = q + (j < r ? 1 : 0);
          if (c) h.push_back(c);
        }
      }
      out.push_back(std::move(h));
    }
  } else {
    std::vector<std::size_t> parts;
    auto rec = [&](auto&& self, std::size_t left, std::size_t cap) -> void {
      if (left == 0) {
        out.push_back(parts);
        return;
      }
      if (parts.size() == m) return;
      for (std::size_t c = std::min(left, cap); c >= 1; --c) {
        parts.push_back(c);
        self(self, left - c, c);
        parts.pop_back();
      }
    };
    rec(rec, n, n);
  }
  return out;
}

/// Single-bucket bucketization realising a histogram over a domain of `domain_size` values.
inline Bucketization bucket_from_histogram(const std::vector<std::size_t>& counts, std::size_t domain_size) {
  std::vector<std::string> domain;
  for (std::size_t v = 0; v < std::max(domain_size, counts.size()); ++v) {
    char name[16];
    std::snprintf(name, sizeof name, "v%02zu", v);
    domain.emplace_back(name);
  }
  std::vector<std::string> values;
  for (std::size_t v = 0; v < counts.size(); ++v) values.insert(values.end(), counts[v], domain[v]);
  return Bucketization::from_values({values}, domain);
}

/// For every distinct entropy h in the family and every k: the least maximum
/// disclosure among the family's tables with entropy h.
inline std::vector<CurvePoint> entropy_vs_disclosure(const EntropyFamily& family, const std::vector<std::size_t>& ks,
                                                     CurveClass cls = CurveClass::implications) {
  // entropy rounded to 1e-9 identifies tables with equal h
  std::map<long long, std::pair<double, std::vector<Probability>>> best;
  for (const auto& h : family_histograms(family)) {
    Bucketization b = bucket_from_histogram(h, family.domain_size);
    double entropy = min_bucket_entropy(b);
    long long key = std::llround(entropy * 1e9);
    DisclosureEngine engine;
    std::vector<Probability> values;
    for (auto k : ks)
      values.push_back(cls == CurveClass::implications ? engine.max_disclosure(b, k).disclosure
                                                       : max_disclosure_negated_atoms(b, k));
    auto [it, inserted] = best.emplace(key, std::make_pair(entropy, values));
    if (!inserted)
      for (std::size_t i = 0; i < ks.size(); ++i) it->second.second[i] = std::min(it->second.second[i], values[i]);
  }
  std::vector<CurvePoint> out;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    char series[48];
    std::snprintf(series, sizeof series, "%s_k%02zu", to_string(cls), ks[i]);
    for (const auto& [key, entry] : best) out.push_back({series, entry.first, entry.second[i]});
  }
  return out;
}

inline std::string format_x(double x) {
  if (x == std::floor(x) && std::fabs(x) < 1e15) return std::to_string(static_cast<long long>(x));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10f", x);
  return buf;
}

/// CSV with header `series,x,num,den,decimal`, rows sorted by (series, x).
inline void emit_csv(std::vector<CurvePoint> points, std::ostream& out) {
  std::stable_sort(points.begin(), points.end(), [](const CurvePoint& a, const CurvePoint& b) {
    return a.series != b.series ? a.series < b.series : a.x < b.x;
  });
  out << "series,x,num,den,decimal\n";
  for (const auto& p : points) {
    out << csv::quote(p.series) << ',' << format_x(p.x) << ',' << numerator_of(p.disclosure).str() << ','
        << denominator_of(p.disclosure).str() << ',' << to_decimal_string(p.disclosure, 10) << '\n';
  }
  if (!out) throw Error("failed to write curve CSV");
}

inline std::vector<CurvePoint> parse_curve_csv(std::istream& in) {
  auto rows = csv::read(in);
  if (rows.empty() || rows[0] != std::vector<std::string>{"series", "x", "num", "den", "decimal"})
    throw ValidationError("curve CSV must start with header series,x,num,den,decimal");
  std::vector<CurvePoint> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 5) throw ValidationError("curve CSV row " + std::to_string(r + 1) + " needs 5 fields");
    out.push_back({row[0], std::stod(row[1]), parse_rational(row[2] + "/" + row[3])});
  }
  return out;
}

}  // namespace wcd

#endif  // WCD_CURVES_HPP
