// Copyright 2026 The cgm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Graph file formats.
//   dense CSV:   "n=<N>,kind=<binary|weighted>" then N comma-separated rows
//   edge list:   "n=<N>" then "u<TAB>v<TAB>w" lines, 0-based, each edge once
// An edge list loads as binary when every weight is 1.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cgm/error.hpp"
#include "cgm/graph.hpp"

namespace cgm {

enum class GraphFormat { kAuto, kDenseCsv, kEdgeList };

inline GraphFormat parse_graph_format(std::string_view s) {
  if (s == "auto") return GraphFormat::kAuto;
  if (s == "csv" || s == "dense") return GraphFormat::kDenseCsv;
  if (s == "tsv" || s == "edges" || s == "edgelist") return GraphFormat::kEdgeList;
  throw InvalidArgument("unknown graph format: " + std::string(s));
}

namespace detail {

inline GraphFormat resolve_format(const std::filesystem::path& path, GraphFormat format) {
  if (format != GraphFormat::kAuto) return format;
  const std::string ext = path.extension().string();
  if (ext == ".csv") return GraphFormat::kDenseCsv;
  if (ext == ".tsv" || ext == ".edges" || ext == ".txt") return GraphFormat::kEdgeList;
  throw InvalidArgument("cannot infer graph format from extension '" + ext + "'");
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(std::string_view s, const std::string& where) {
  // std::from_chars for double is available in libstdc++ 11.
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw IoError(IoErrorCode::kBadValue, where + ": bad numeric value '" + std::string(s) + "'");
  }
  return v;
}

inline long parse_index(std::string_view s, const std::string& where) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError(IoErrorCode::kBadValue, where + ": bad index '" + std::string(s) + "'");
  }
  return v;
}

inline int parse_order(std::string_view field, const std::string& where) {
  if (field.substr(0, 2) != "n=") throw IoError(IoErrorCode::kMalformedHeader, where + ": header must start with n=<N>");
  long n = 0;
  const auto body = field.substr(2);
  const auto res = std::from_chars(body.data(), body.data() + body.size(), n);
  if (body.empty() || res.ec != std::errc() || res.ptr != body.data() + body.size() || n < 1) {
    throw IoError(IoErrorCode::kMalformedHeader, where + ": invalid vertex count in header");
  }
  return static_cast<int>(n);
}

inline Graph load_dense_csv(std::istream& in, const std::string& where) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(IoErrorCode::kMalformedHeader, where + ": empty file");
  const auto head = split(trim(line), ',');
  if (head.size() != 2 || head[1].substr(0, 5) != "kind=") {
    throw IoError(IoErrorCode::kMalformedHeader, where + ": header must be n=<N>,kind=<binary|weighted>");
  }
  const int n = parse_order(head[0], where);
  const auto kind_name = head[1].substr(5);
  GraphKind kind;
  if (kind_name == "binary") {
    kind = GraphKind::kBinary;
  } else if (kind_name == "weighted") {
    kind = GraphKind::kWeighted;
  } else {
    throw IoError(IoErrorCode::kMalformedHeader, where + ": unknown kind '" + std::string(kind_name) + "'");
  }
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line)) {
      throw IoError(IoErrorCode::kMalformedRow, where + ": expected " + std::to_string(n) + " rows, got " + std::to_string(i));
    }
    const auto cells = split(trim(line), ',');
    if (static_cast<int>(cells.size()) != n) {
      throw IoError(IoErrorCode::kMalformedRow, where + ": row " + std::to_string(i) + " has " +
                                                    std::to_string(cells.size()) + " entries, expected " + std::to_string(n));
    }
    for (int j = 0; j < n; ++j) m(i, j) = parse_double(cells[j], where);
  }
  while (std::getline(in, line)) {
    if (!trim(line).empty()) throw IoError(IoErrorCode::kMalformedRow, where + ": trailing data after matrix rows");
  }
  for (int i = 0; i < n; ++i) {
    if (m(i, i) != 0.0) throw IoError(IoErrorCode::kNonHollow, where + ": nonzero diagonal at " + std::to_string(i));
    for (int j = i + 1; j < n; ++j) {
      if (m(i, j) != m(j, i)) {
        throw IoError(IoErrorCode::kAsymmetric,
                      where + ": asymmetric entries at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  if (kind == GraphKind::kBinary) {
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      const double v = m.data()[k];
      if (v != 0.0 && v != 1.0) throw IoError(IoErrorCode::kBadValue, where + ": binary graph has non-0/1 entry");
    }
  }
  return Graph(std::move(m), kind);
}

inline Graph load_edge_list(std::istream& in, const std::string& where) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(IoErrorCode::kMalformedHeader, where + ": empty file");
  const int n = parse_order(trim(line), where);
  Matrix m = Matrix::Zero(n, n);
  std::vector<char> seen(static_cast<std::size_t>(n) * n, 0);
  bool binary = true;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty()) continue;
    const std::string at = where + ":" + std::to_string(lineno);
    const auto cells = split(body, '\t');
    if (cells.size() != 3) throw IoError(IoErrorCode::kMalformedRow, at + ": expected u<TAB>v<TAB>w");
    const long u = parse_index(cells[0], at);
    const long v = parse_index(cells[1], at);
    const double w = parse_double(cells[2], at);
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw IoError(IoErrorCode::kIndexOutOfRange, at + ": vertex index out of range [0," + std::to_string(n) + ")");
    }
    if (u == v) throw IoError(IoErrorCode::kNonHollow, at + ": self-loop");
    const std::size_t key = static_cast<std::size_t>(std::min(u, v)) * n + std::max(u, v);
    if (seen[key]) throw IoError(IoErrorCode::kDuplicateEdge, at + ": duplicate edge");
    seen[key] = 1;
    m(u, v) = w;
    m(v, u) = w;
    if (w != 1.0) binary = false;
  }
  return Graph(std::move(m), binary ? GraphKind::kBinary : GraphKind::kWeighted);
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline Graph load_graph(const std::filesystem::path& path, GraphFormat format = GraphFormat::kAuto) {
  const GraphFormat fmt = detail::resolve_format(path, format);
  std::ifstream in(path);
  if (!in) throw IoError(IoErrorCode::kOpenFailed, "cannot open " + path.string());
  return fmt == GraphFormat::kDenseCsv ? detail::load_dense_csv(in, path.string())
                                       : detail::load_edge_list(in, path.string());
}

inline void write_graph(std::ostream& out, const Graph& g, GraphFormat format) {
  const int n = g.n();
  if (format == GraphFormat::kDenseCsv) {
    out << "n=" << n << ",kind=" << to_string(g.kind()) << '\n';
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (j) out << ',';
        out << (g.is_binary() ? (g(i, j) != 0.0 ? "1" : "0") : detail::format_double(g(i, j)));
      }
      out << '\n';
    }
    return;
  }
  out << "n=" << n << '\n';
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (g(i, j) == 0.0) continue;
      out << i << '\t' << j << '\t' << (g.is_binary() ? std::string("1") : detail::format_double(g(i, j))) << '\n';
    }
  }
}

inline void save_graph(const Graph& g, const std::filesystem::path& path, GraphFormat format = GraphFormat::kAuto) {
  const GraphFormat fmt = detail::resolve_format(path, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(IoErrorCode::kOpenFailed, "cannot open " + path.string() + " for writing");
  write_graph(out, g, fmt);
  out.flush();
  if (!out) throw IoError(IoErrorCode::kWriteFailed, "write failed for " + path.string());
}

}  // namespace cgm
