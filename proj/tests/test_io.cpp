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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cgm/error.hpp"
#include "cgm/io.hpp"
#include "cgm/random_models.hpp"
#include "test_util.hpp"

namespace cgm {
namespace {

namespace fs = std::filesystem;
using testing::seed;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("cgm_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

IoErrorCode load_error(const fs::path& p) {
  try {
    load_graph(p);
  } catch (const IoError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no IoError for " << p;
  return IoErrorCode::kWriteFailed;
}

TEST(Io, RoundTripBinaryExact) {
  TempDir dir;
  for (int k = 0; k < 20; ++k) {
    const Graph g = sample_er(5 + k, 0.3, seed(1, k));
    for (const char* ext : {".csv", ".tsv"}) {
      const fs::path p = dir / ("g" + std::to_string(k) + ext);
      save_graph(g, p);
      const Graph back = load_graph(p);
      EXPECT_TRUE(back.is_binary());
      EXPECT_EQ(back, g) << p;
    }
  }
}

TEST(Io, RoundTripWeighted) {
  TempDir dir;
  for (int k = 0; k < 20; ++k) {
    const Graph g = testing::random_weighted(4 + k, seed(2, k));
    for (const char* ext : {".csv", ".tsv"}) {
      const fs::path p = dir / ("w" + std::to_string(k) + ext);
      save_graph(g, p);
      const Graph back = load_graph(p);
      EXPECT_FALSE(back.is_binary());
      EXPECT_LE((back.matrix() - g.matrix()).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Io, WeightedSeventyVertexCsv) {
  TempDir dir;
  const Graph g = testing::random_weighted(70, seed(3));
  const fs::path p = dir / "conn.csv";
  save_graph(g, p);
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "n=70,kind=weighted");
  const Graph back = load_graph(p);
  EXPECT_EQ(back.n(), 70);
  EXPECT_FALSE(back.is_binary());
}

TEST(Io, EdgeListWithUnitWeightsIsBinary) {
  TempDir dir;
  write_text(dir / "a.tsv", "n=3\n0\t1\t1\n1\t2\t1\n");
  const Graph g = load_graph(dir / "a.tsv");
  EXPECT_TRUE(g.is_binary());
  EXPECT_EQ(g(1, 0), 1.0);
  EXPECT_EQ(g(0, 2), 0.0);
  write_text(dir / "b.tsv", "n=3\n0\t1\t0.5\n");
  EXPECT_FALSE(load_graph(dir / "b.tsv").is_binary());
}

TEST(Io, DistinctDiagnostics) {
  TempDir dir;
  const auto check = [&](const std::string& name, const std::string& text, IoErrorCode code) {
    write_text(dir / name, text);
    EXPECT_EQ(load_error(dir / name), code) << name;
  };
  check("empty.csv", "", IoErrorCode::kMalformedHeader);
  check("hdr.csv", "3,binary\n0,1,0\n1,0,0\n0,0,0\n", IoErrorCode::kMalformedHeader);
  check("kind.csv", "n=2,kind=fuzzy\n0,1\n1,0\n", IoErrorCode::kMalformedHeader);
  check("order.csv", "n=0,kind=binary\n", IoErrorCode::kMalformedHeader);
  check("short.csv", "n=3,kind=binary\n0,1,0\n1,0,0\n", IoErrorCode::kMalformedRow);
  check("width.csv", "n=2,kind=binary\n0,1,0\n1,0\n", IoErrorCode::kMalformedRow);
  check("extra.csv", "n=2,kind=binary\n0,1\n1,0\n0,0\n", IoErrorCode::kMalformedRow);
  check("asym.csv", "n=2,kind=binary\n0,1\n0,0\n", IoErrorCode::kAsymmetric);
  check("diag.csv", "n=2,kind=weighted\n1,0\n0,0\n", IoErrorCode::kNonHollow);
  check("value.csv", "n=2,kind=binary\n0,x\nx,0\n", IoErrorCode::kBadValue);
  check("nonbin.csv", "n=2,kind=binary\n0,2\n2,0\n", IoErrorCode::kBadValue);
  check("ehdr.tsv", "3\n0\t1\t1\n", IoErrorCode::kMalformedHeader);
  check("erow.tsv", "n=3\n0\t1\n", IoErrorCode::kMalformedRow);
  check("range.tsv", "n=3\n0\t3\t1\n", IoErrorCode::kIndexOutOfRange);
  check("neg.tsv", "n=3\n-1\t2\t1\n", IoErrorCode::kIndexOutOfRange);
  check("loop.tsv", "n=3\n1\t1\t1\n", IoErrorCode::kNonHollow);
  check("dup.tsv", "n=3\n0\t1\t1\n1\t0\t1\n", IoErrorCode::kDuplicateEdge);
  check("eval.tsv", "n=3\n0\t1\tabc\n", IoErrorCode::kBadValue);
  EXPECT_EQ(load_error(dir / "missing.csv"), IoErrorCode::kOpenFailed);
}

TEST(Io, FormatSelection) {
  EXPECT_EQ(parse_graph_format("csv"), GraphFormat::kDenseCsv);
  EXPECT_EQ(parse_graph_format("tsv"), GraphFormat::kEdgeList);
  EXPECT_EQ(parse_graph_format("auto"), GraphFormat::kAuto);
  EXPECT_THROW(parse_graph_format("xml"), InvalidArgument);
  TempDir dir;
  const Graph g = sample_er(6, 0.5, seed(4));
  EXPECT_THROW(save_graph(g, dir / "g.bin"), InvalidArgument);
  save_graph(g, dir / "g.bin", GraphFormat::kEdgeList);
  EXPECT_EQ(load_graph(dir / "g.bin", GraphFormat::kEdgeList), g);
  EXPECT_THROW(save_graph(g, dir / "nodir" / "g.csv"), IoError);
}

TEST(Io, EdgeListWritesEachEdgeOnce) {
  const Graph g = sample_er(12, 0.4, seed(5));
  std::ostringstream out;
  write_graph(out, g, GraphFormat::kEdgeList);
  int lines = 0;
  std::istringstream in(out.str());
  std::string line;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines - 1, static_cast<int>(g.matrix().sum() / 2));
}

}  // namespace
}  // namespace cgm
