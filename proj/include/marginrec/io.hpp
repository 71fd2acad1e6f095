#pragma once

#include "marginrec/core.hpp"
#include "marginrec/instances.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace marginrec {

struct SchemaError : InvalidInput {
  SchemaError(const std::string& where, std::size_t line, const std::string& what)
      : InvalidInput(where + ":" + std::to_string(line) + ": " + what), line_number(line) {}
  std::size_t line_number;
};

// Shortest text that parses back to the same double; "inf" / "-inf".
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view s, double& out) {
  if (s == "inf" || s == "+inf") {
    out = kInfinity;
    return true;
  }
  if (s == "-inf") {
    out = -kInfinity;
    return true;
  }
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && !s.empty();
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Instance file
//
//   marginrec-instance 1
//   generator <name>
//   seed <u64>
//   dim <m>
//   k <k>
//   n <n>
//   param <key> <value>                       (any number)
//   metric <id> euclidean
//   metric <id> mahalanobis <m*m entries, row-major>
//   metric <id> projection <r> <m*r entries of the m x r basis, row-major>
//   certificate <name> <value>                (any number)
//   center <id> <m coordinates>               (any number)
//   points
//   x1,...,xm,label
//   <m values>,<label>                        (n rows)

inline void write_instance(const Instance& inst, std::ostream& out) {
  const std::size_t m = inst.dim();
  out << "marginrec-instance 1\n";
  out << "generator " << (inst.generator.empty() ? "unknown" : inst.generator) << "\n";
  out << "seed " << inst.seed << "\n";
  out << "dim " << m << "\n";
  out << "k " << inst.k() << "\n";
  out << "n " << inst.size() << "\n";
  for (const auto& [key, v] : inst.params) out << "param " << key << " " << format_double(v) << "\n";
  for (std::size_t i = 0; i < inst.metrics.size(); ++i) {
    const Pseudometric& d = inst.metrics[i];
    out << "metric " << (i + 1) << " " << d.kind_name();
    if (d.kind() == Pseudometric::Kind::mahalanobis) {
      for (Eigen::Index r = 0; r < d.weight().rows(); ++r)
        for (Eigen::Index c = 0; c < d.weight().cols(); ++c) out << " " << format_double(d.weight()(r, c));
    } else if (d.kind() == Pseudometric::Kind::projection) {
      out << " " << d.basis().cols();
      for (Eigen::Index r = 0; r < d.basis().rows(); ++r)
        for (Eigen::Index c = 0; c < d.basis().cols(); ++c) out << " " << format_double(d.basis()(r, c));
    }
    out << "\n";
  }
  for (const auto& [key, v] : inst.certified)
    out << "certificate " << key << " " << format_double(v) << "\n";
  for (std::size_t i = 0; i < inst.centers.size(); ++i) {
    out << "center " << (i + 1);
    for (Eigen::Index j = 0; j < inst.centers[i].size(); ++j) out << " " << format_double(inst.centers[i][j]);
    out << "\n";
  }
  out << "points\n";
  for (std::size_t j = 0; j < m; ++j) out << "x" << (j + 1) << ",";
  out << "label\n";
  for (std::size_t i = 0; i < inst.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j)
      out << format_double(inst.points.matrix()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))) << ",";
    out << inst.truth[i] << "\n";
  }
}

inline Instance read_instance(std::istream& in, const std::string& where = "instance") {
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) -> SchemaError { return SchemaError(where, lineno, what); };
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty() && line[0] != '#') return true;
    }
    return false;
  };

  if (!next() || line != "marginrec-instance 1") throw fail("expected header 'marginrec-instance 1'");
  Instance inst;
  long long dim = -1, k = -1, n = -1;
  std::vector<std::pair<int, Pseudometric>> metrics;
  std::vector<std::pair<int, Point>> centers;
  bool have_seed = false;
  for (;;) {
    if (!next()) throw fail("missing 'points' section");
    if (line == "points") break;
    auto tok = split_ws(line);
    const std::string_view key = tok[0];
    auto need = [&](std::size_t count) {
      if (tok.size() < count) throw fail("too few fields for '" + std::string(key) + "'");
    };
    auto num = [&](std::size_t i) {
      double v;
      if (!parse_double(tok[i], v)) throw fail("bad number '" + std::string(tok[i]) + "'");
      return v;
    };
    auto integer = [&](std::size_t i) {
      long long v;
      if (!parse_int(tok[i], v)) throw fail("bad integer '" + std::string(tok[i]) + "'");
      return v;
    };
    if (key == "generator") {
      need(2);
      inst.generator = std::string(tok[1]);
    } else if (key == "seed") {
      need(2);
      if (!parse_int(tok[1], inst.seed)) throw fail("bad seed '" + std::string(tok[1]) + "'");
      have_seed = true;
    } else if (key == "dim") {
      need(2);
      dim = integer(1);
    } else if (key == "k") {
      need(2);
      k = integer(1);
    } else if (key == "n") {
      need(2);
      n = integer(1);
    } else if (key == "param") {
      need(3);
      inst.params[std::string(tok[1])] = num(2);
    } else if (key == "certificate") {
      need(3);
      inst.certified[std::string(tok[1])] = num(2);
    } else if (key == "metric") {
      need(3);
      if (dim < 1) throw fail("'dim' must precede metric lines");
      const int id = static_cast<int>(integer(1));
      const Eigen::Index md = static_cast<Eigen::Index>(dim);
      try {
        if (tok[2] == "euclidean") {
          metrics.emplace_back(id, Pseudometric::euclidean(static_cast<std::size_t>(dim)));
        } else if (tok[2] == "mahalanobis") {
          if (tok.size() != 3 + static_cast<std::size_t>(md * md)) throw fail("mahalanobis metric needs dim*dim entries");
          Matrix w(md, md);
          for (Eigen::Index r = 0; r < md; ++r)
            for (Eigen::Index c = 0; c < md; ++c) w(r, c) = num(3 + static_cast<std::size_t>(r * md + c));
          metrics.emplace_back(id, Pseudometric::mahalanobis(w));
        } else if (tok[2] == "projection") {
          need(4);
          const Eigen::Index rk = static_cast<Eigen::Index>(integer(3));
          if (rk < 0 || tok.size() != 4 + static_cast<std::size_t>(md * rk))
            throw fail("projection metric needs dim*r entries");
          Matrix b(md, rk);
          for (Eigen::Index r = 0; r < md; ++r)
            for (Eigen::Index c = 0; c < rk; ++c) b(r, c) = num(4 + static_cast<std::size_t>(r * rk + c));
          metrics.emplace_back(id, Pseudometric::projection(b));
        } else {
          throw fail("unknown metric kind '" + std::string(tok[2]) + "'");
        }
      } catch (const SchemaError&) {
        throw;
      } catch (const InvalidInput& e) {
        throw fail(e.what());
      }
    } else if (key == "center") {
      need(2);
      if (dim < 1) throw fail("'dim' must precede center lines");
      if (tok.size() != 2 + static_cast<std::size_t>(dim)) throw fail("center needs dim coordinates");
      Point c(static_cast<Eigen::Index>(dim));
      for (Eigen::Index j = 0; j < c.size(); ++j) c[j] = num(2 + static_cast<std::size_t>(j));
      centers.emplace_back(static_cast<int>(integer(1)), c);
    } else {
      throw fail("unknown header key '" + std::string(key) + "'");
    }
  }
  if (dim < 1) throw fail("missing or invalid 'dim'");
  if (k < 1) throw fail("missing or invalid 'k'");
  if (n < 0) throw fail("missing or invalid 'n'");
  if (!have_seed) throw fail("missing 'seed'");
  for (std::size_t i = 0; i < metrics.size(); ++i)
    if (metrics[i].first != static_cast<int>(i + 1)) throw fail("metric ids must be 1..k in order");
  if (!metrics.empty() && metrics.size() != static_cast<std::size_t>(k))
    throw fail("expected " + std::to_string(k) + " metric lines");
  for (auto& [id, d] : metrics) inst.metrics.push_back(d);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (centers[i].first != static_cast<int>(i + 1)) throw fail("center ids must be 1..k in order");
    inst.centers.push_back(centers[i].second);
  }

  const std::size_t m = static_cast<std::size_t>(dim);
  if (!next()) throw fail("missing column header row");
  {
    auto cols = split(line, ',');
    for (std::size_t j = 0; j < m; ++j) {
      std::string want = "x" + std::to_string(j + 1);
      if (j >= cols.size() || cols[j] != want) throw fail("missing column '" + want + "'");
    }
    if (cols.size() < m + 1 || cols[m] != "label") throw fail("missing column 'label'");
    if (cols.size() > m + 1) throw fail("unexpected column '" + std::string(cols[m + 1]) + "'");
  }
  Matrix pts(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  std::vector<ClusterId> labels(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    if (!next()) throw fail("expected " + std::to_string(n) + " point rows, got " + std::to_string(i));
    auto cells = split(line, ',');
    if (cells.size() != m + 1) throw fail("row has " + std::to_string(cells.size()) + " fields, expected " + std::to_string(m + 1));
    for (std::size_t j = 0; j < m; ++j) {
      double v;
      if (!parse_double(cells[j], v) || !std::isfinite(v))
        throw fail("bad coordinate in column 'x" + std::to_string(j + 1) + "'");
      pts(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
    int lab;
    if (!parse_int(cells[m], lab) || lab < 1 || lab > k) throw fail("bad value in column 'label'");
    labels[static_cast<std::size_t>(i)] = lab;
  }
  if (next()) throw fail("trailing content after the last point row");
  inst.points = PointSet(pts);
  inst.truth = Clustering(labels, static_cast<int>(k));
  return inst;
}

inline void write_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_instance(inst, out);
  if (!out) throw Error("write to '" + path + "' failed");
}

inline Instance read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_instance(in, path);
}

// ---------------------------------------------------------------------------
// Results file: one CSV row per run.

struct ResultRow {
  std::string algorithm;
  std::size_t n = 0, m = 0;
  int k = 0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t label_queries = 0, scq_queries = 0;
  std::size_t rounds = 0;
  bool exact = false;
  std::size_t misclassified_ever = 0;
  double wall_ms = 0.0;
  // provenance for replay
  std::string generator;
  std::uint64_t instance_seed = 0;
  std::string config;  // key=value pairs separated by ';'

  bool operator==(const ResultRow&) const = default;
};

inline const char* result_header() {
  return "algorithm,n,m,k,gamma,seed,label_queries,scq_queries,rounds,exact,misclassified_ever,"
         "wall_ms,generator,instance_seed,config";
}

inline std::string format_result(const ResultRow& r) {
  std::ostringstream o;
  o << r.algorithm << ',' << r.n << ',' << r.m << ',' << r.k << ',' << format_double(r.gamma) << ','
    << r.seed << ',' << r.label_queries << ',' << r.scq_queries << ',' << r.rounds << ','
    << (r.exact ? 1 : 0) << ',' << r.misclassified_ever << ',' << format_double(r.wall_ms) << ','
    << r.generator << ',' << r.instance_seed << ',' << r.config;
  return o.str();
}

inline ResultRow parse_result(std::string_view line) {
  auto c = split(line, ',');
  if (c.size() != 15) throw SchemaError("results", 0, "expected 15 fields, got " + std::to_string(c.size()));
  ResultRow r;
  auto bad = [&](const char* col) { return SchemaError("results", 0, std::string("bad value in column '") + col + "'"); };
  int exact = 0;
  r.algorithm = std::string(c[0]);
  if (!parse_int(c[1], r.n)) throw bad("n");
  if (!parse_int(c[2], r.m)) throw bad("m");
  if (!parse_int(c[3], r.k)) throw bad("k");
  if (!parse_double(c[4], r.gamma)) throw bad("gamma");
  if (!parse_int(c[5], r.seed)) throw bad("seed");
  if (!parse_int(c[6], r.label_queries)) throw bad("label_queries");
  if (!parse_int(c[7], r.scq_queries)) throw bad("scq_queries");
  if (!parse_int(c[8], r.rounds)) throw bad("rounds");
  if (!parse_int(c[9], exact) || (exact != 0 && exact != 1)) throw bad("exact");
  r.exact = exact == 1;
  if (!parse_int(c[10], r.misclassified_ever)) throw bad("misclassified_ever");
  if (!parse_double(c[11], r.wall_ms)) throw bad("wall_ms");
  r.generator = std::string(c[12]);
  if (!parse_int(c[13], r.instance_seed)) throw bad("instance_seed");
  r.config = std::string(c[14]);
  return r;
}

// Appends a row, writing the header first if the file is new or empty.
inline void append_result(const ResultRow& row, const std::string& path) {
  bool fresh = true;
  {
    std::ifstream probe(path, std::ios::binary | std::ios::ate);
    if (probe && probe.tellg() > 0) fresh = false;
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error("cannot open '" + path + "' for appending");
  if (fresh) out << result_header() << "\n";
  out << format_result(row) << "\n";
  if (!out) throw Error("write to '" + path + "' failed");
}

inline std::vector<ResultRow> read_results(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::string line;
  std::vector<ResultRow> rows;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != result_header()) throw SchemaError(path, 1, "unexpected results header");
      continue;
    }
    if (line.empty()) continue;
    try {
      rows.push_back(parse_result(line));
    } catch (const SchemaError& e) {
      throw SchemaError(path, lineno, e.what());
    }
  }
  return rows;
}

}  // namespace marginrec
