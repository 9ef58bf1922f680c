#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lfdrshrink/cli.hpp"

using namespace lfdrshrink;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "lfdrshrink");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "lfdrshrink_test_cli";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::filesystem::path write_matrix_file(const std::string& name, std::size_t m, double shift) {
  const auto path = scratch(name);
  std::ofstream out(path);
  out << "id\tr1\tr2\tr3\n";
  RandomStream rng(77, 0);
  for (std::size_t i = 0; i < m; ++i) {
    const double theta = i % 10 == 0 ? shift : 0.0;
    out << "f" << i;
    for (int j = 0; j < 3; ++j) out << '\t' << format_number(theta + rng.normal());
    out << '\n';
  }
  return path;
}

}  // namespace

TEST_CASE("simulate matches the recorded golden report", "[cli][golden]") {
  const Run r = run({"simulate", "--pi0", "0.9", "--m", "2000", "--n", "2", "--experiments", "200", "--seed", "7"});
  REQUIRE(r.code == kExitOk);
  const auto golden = std::filesystem::path(LFDRSHRINK_TEST_DATA_DIR) / "golden" / "simulate_pi0_0.9_seed7.tsv";
  CHECK(r.out == slurp(golden));
}

TEST_CASE("simulate is deterministic and thread-count independent", "[cli]") {
  const std::vector<std::string> base{"simulate", "--m", "600", "--experiments", "12", "--seed", "3", "--track",
                                      "all_features"};
  auto one = base;
  one.insert(one.end(), {"--threads", "1"});
  auto four = base;
  four.insert(four.end(), {"--threads", "4"});
  const Run a = run(one);
  const Run b = run(one);
  const Run c = run(four);
  REQUIRE(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
}

TEST_CASE("simulate defaults", "[cli]") {
  const Run r = run({"simulate", "--m", "10000", "--experiments", "1", "--seed", "5"});
  REQUIRE(r.code == kExitOk);
  for (const char* line : {"\nm\t10000\n", "\nn\t2\n", "\npi0\t0.9\n", "\neffect\t2\n", "\nsigma_null\t1\n",
                           "\nsigma_alt\t1.5\n", "\nexperiments\t1\n", "\nseed\t5\n", "\nlevel\t0.95\n",
                           "\ntrack\tfirst_feature\n", "\nlfdr_bins\t120\n"}) {
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring(line));
  }
}

TEST_CASE("usage errors exit with code 2", "[cli]") {
  const Run missing = run({"analyze"});
  CHECK(missing.code == kExitUsage);
  CHECK_THAT(missing.err, Catch::Matchers::ContainsSubstring("--input"));
  CHECK_THAT(missing.err, Catch::Matchers::ContainsSubstring("Usage"));

  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"simulate", "--m", "abc"}).code == kExitUsage);
  CHECK(run({"simulate", "--pi0", "1.5"}).code == kExitUsage);
  CHECK(run({"simulate", "--track", "some"}).code == kExitUsage);
  CHECK(run({"simulate", "--n", "1"}).code == kExitUsage);
  CHECK(run({"simulate", "--level", "1"}).code == kExitUsage);

  const auto input = write_matrix_file("usage.tsv", 200, 3.0);
  CHECK(run({"analyze", "--input", input.string(), "--level", "0"}).code == kExitUsage);
  CHECK(run({"analyze", "--input", input.string(), "--paired", "r1"}).code == kExitUsage);
  CHECK(run({"analyze", "--input", input.string(), "--delimiter", "xx"}).code == kExitUsage);
}

TEST_CASE("help exits with code 0", "[cli]") {
  const Run r = run({"--help"});
  CHECK(r.code == kExitOk);
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("simulate"));
}

TEST_CASE("data errors exit with code 3", "[cli]") {
  const auto bad = scratch("bad.tsv");
  {
    std::ofstream out(bad);
    out << "id\ta\tb\nA\t1\t2\nB\t1\toops\n";
  }
  const Run r = run({"analyze", "--input", bad.string()});
  CHECK(r.code == kExitData);
  CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("line 3, column 3"));

  CHECK(run({"analyze", "--input", (scratch("missing") / "none.tsv").string()}).code == kExitData);

  // Too few features for the mixture fit.
  const auto tiny = write_matrix_file("tiny.tsv", 20, 3.0);
  CHECK(run({"analyze", "--input", tiny.string()}).code == kExitData);

  // A constant row has no variance.
  const auto flat = scratch("flat.tsv");
  {
    std::ofstream out(flat);
    out << "id\ta\tb\nA\t1\t1\n";
  }
  CHECK(run({"analyze", "--input", flat.string()}).code == kExitData);
}

TEST_CASE("fit failures exit with code 4", "[cli]") {
  const auto input = write_matrix_file("fit.tsv", 300, 3.0);
  CHECK(run({"analyze", "--input", input.string(), "--bins", "0"}).code != kExitOk);
  const Run r = run({"simulate", "--m", "300", "--experiments", "1", "--degree", "60"});
  CHECK(r.code == kExitNumeric);
}

TEST_CASE("analyze writes the report and plot data", "[cli]") {
  const auto input = write_matrix_file("analyze.tsv", 500, 4.0);
  const Run to_stdout = run({"analyze", "--input", input.string()});
  REQUIRE(to_stdout.code == kExitOk);
  CHECK(to_stdout.out.rfind("feature_id\tmean\t", 0) == 0);
  CHECK_THAT(to_stdout.err, Catch::Matchers::ContainsSubstring("pi0_hat\t"));

  const auto report = scratch("report.tsv");
  const auto plots = scratch("plots");
  std::filesystem::remove_all(plots);
  const Run to_file =
      run({"analyze", "--input", input.string(), "--output", report.string(), "--plots-dir", plots.string()});
  REQUIRE(to_file.code == kExitOk);
  CHECK(slurp(report) == to_stdout.out);
  CHECK_THAT(to_file.out, Catch::Matchers::ContainsSubstring("pi0_hat\t"));
  for (const char* name : {"median_vs_lfdr.tsv", "width_scatter.tsv", "confidence_levels.tsv", "fit_density.tsv"}) {
    CHECK(std::filesystem::exists(plots / name));
  }
}

TEST_CASE("analyze reads csv and paired layouts", "[cli]") {
  const auto csv = scratch("paired.csv");
  {
    std::ofstream out(csv);
    out << "gene,T1,C1,T2,C2\n";
    RandomStream rng(13, 0);
    for (int i = 0; i < 300; ++i) {
      out << "g" << i;
      for (int k = 0; k < 4; ++k) out << ',' << format_number(5.0 + rng.normal());
      out << '\n';
    }
  }
  const Run r = run({"analyze", "--input", csv.string(), "--paired", "T1,C1,T2,C2"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.rfind("feature_id,mean,t,", 0) == 0);
}
