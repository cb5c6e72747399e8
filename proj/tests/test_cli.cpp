#include "tvls.hpp"
#include "tvls/io.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kModels = TVLS_MODELS_DIR;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tvls-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliResult invoke(const std::string& args) {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = "cd '" + dir_.string() + "' && '" + std::string(TVLS_BINARY) + "' " + args + " > '" +
                            out.string() + "' 2> '" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  std::string model(const std::string& name) const { return "--model '" + kModels + "/" + name + "'"; }
  fs::path path(const std::string& name) const { return dir_ / name; }

  fs::path dir_;
};

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_F(Cli, SpectrumRowCount) {
  const auto r = invoke("spectrum " + model("car1.json") + " --t 0 --lmax 5 --dl 0.01 --out spec.csv");
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string body = slurp(path("spec.csv"));
  EXPECT_EQ(count_lines(body), 1002);  // header + 1001 rows
  const auto rows = csv(body);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"lambda", "f"}));
  EXPECT_NEAR(std::stod(rows[501][1]), 1.0 / (2 * std::numbers::pi), 1e-4);
  EXPECT_TRUE(fs::exists(path("spec.csv.manifest.json")));
}

TEST_F(Cli, UnstableModelReportsFailureAsData) {
  const auto r = invoke("stability " + model("unstable.json") + " --route a");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_FALSE(j["passes"].get<bool>());
  EXPECT_TRUE(j["certificate"].is_null());
}

TEST_F(Cli, StabilityCertificateAndSpotCheck) {
  const auto r = invoke("stability " + model("carma21.json") + " --window -2,2");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["passes"].get<bool>());
  EXPECT_LE(j["spot_check_ratio"].get<double>(), 1.05);
}

TEST_F(Cli, ConvergeMatchesLibraryBitForBit) {
  const auto r = invoke("converge " + model("tvcar1.json") + " --t 0 --Ns 1,2,4,8,16");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv(r.out);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"N", "distance"}));

  const auto manifest = json::parse(slurp(path("tvls-manifest.json")));
  const auto b = tvls::io::load_model(kModels + "/tvcar1.json");
  const auto cert = tvls::io::certificate_from_json(manifest["resolved"]["certificate"]);
  const double u_max = manifest["resolved"]["umax"].get<double>();
  const auto table = tvls::convergence_diagnostic(b.model, 0.0, {1, 2, 4, 8, 16}, u_max, 0.01, {{}, &cert});
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", table.rows[i].distance);
    EXPECT_EQ(rows[i + 1][1], buf);
  }
  EXPECT_TRUE(manifest["resolved"]["report"]["passes"].get<bool>());
}

TEST_F(Cli, ReplayIsByteIdentical) {
  const std::vector<std::string> runs{
      "simulate " + model("tvcar1.json") + " --N 4 --t0 -0.5 --t1 0.5 --dt 0.05 --paths 3 --seed 7 --out a.csv",
      "kernel " + model("carma21.json") + " --t 0 --N 3 --du 0.05 --out a.csv",
      "wigner " + model("car1.json") + " --t 0 --N 2 --lmax 2 --dl 0.1 --smax 10 --ds 0.1 --out a.csv",
      "transition " + model("tvcarma21.json") + " --s0 0 --s 1 --method pb --out a.csv",
  };
  for (const auto& cmd : runs) {
    const auto first = invoke(cmd);
    ASSERT_EQ(first.code, 0) << cmd << "\n" << first.err;
    const std::string original = slurp(path("a.csv"));
    fs::rename(path("a.csv"), path("original.csv"));
    const auto again = invoke("replay a.csv.manifest.json --manifest replay.json");
    ASSERT_EQ(again.code, 0) << again.err;
    EXPECT_EQ(slurp(path("a.csv")), original) << cmd;
    fs::remove(path("a.csv"));
  }
}

TEST_F(Cli, ManifestIsSelfContained) {
  fs::copy_file(kModels + "/tvcar1.json", path("m.json"));
  const auto r = invoke("kernel --model m.json --t 0 --N 8 --out k.csv");
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string original = slurp(path("k.csv"));
  const auto manifest = json::parse(slurp(path("k.csv.manifest.json")));
  EXPECT_EQ(manifest["version"], tvls::kVersion);
  EXPECT_EQ(manifest["command"], "kernel");
  EXPECT_TRUE(manifest["params"].contains("du"));
  fs::remove(path("m.json"));
  fs::remove(path("k.csv"));
  const auto again = invoke("replay k.csv.manifest.json --manifest again.json");
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(slurp(path("k.csv")), original);
}

TEST_F(Cli, InputsAreNotModified) {
  fs::copy_file(kModels + "/carma21.json", path("m.json"));
  const std::string before = slurp(path("m.json"));
  const auto time_before = fs::last_write_time(path("m.json"));
  ASSERT_EQ(invoke("spectrum --model m.json --lmax 1 --dl 0.5").code, 0);
  ASSERT_EQ(invoke("control --model m.json --tgrid 0:1:3").code, 0);
  const auto clash = invoke("spectrum --model m.json --lmax 1 --dl 0.5 --out m.json");
  EXPECT_EQ(clash.code, 2);
  EXPECT_EQ(slurp(path("m.json")), before);
  EXPECT_EQ(fs::last_write_time(path("m.json")), time_before);
}

TEST_F(Cli, UnknownFlagExitsTwo) {
  const auto r = invoke("kernel " + model("car1.json") + " --bogus 1");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bogus"), std::string::npos);
}

TEST_F(Cli, UnknownSubcommandExitsTwo) { EXPECT_EQ(invoke("frobnicate").code, 2); }

TEST_F(Cli, MalformedModelNamesField) {
  std::ofstream(path("bad.json")) << R"({"p": 1, "A": [[{"family": "logistic", "params": [1, 2]}]], "B": [1], "C": [1]})";
  const auto r = invoke("kernel --model bad.json --t 0 --N 1");
  EXPECT_EQ(r.code, 2);
  const auto j = json::parse(r.err.substr(r.err.find('{')));
  EXPECT_EQ(j["error"], "model_format");
  EXPECT_EQ(j["field"], "A[0][0].params");

  std::ofstream(path("broken.json")) << "{ not json";
  EXPECT_EQ(invoke("kernel --model broken.json").code, 2);
  EXPECT_EQ(invoke("kernel --model missing.json").code, 2);
}

TEST_F(Cli, PreconditionFailureIsMachineReadable) {
  const auto r = invoke("wigner " + model("unstable.json") + " --N 2 --lmax 1 --dl 0.5 --smax 10 --ds 0.1");
  EXPECT_EQ(r.code, 2);
  const auto j = json::parse(r.err);
  EXPECT_EQ(j["error"], "precondition");
  EXPECT_FALSE(j["message"].get<std::string>().empty());
}

TEST_F(Cli, DivergenceCarriesTermNorms) {
  std::ofstream(path("fast.json")) << R"({"p": 1, "A": [[40]], "B": [1], "C": [1]})";
  const auto r = invoke("transition --model fast.json --s0 0 --s 5 --method pb --max-terms 4");
  EXPECT_EQ(r.code, 2);
  const auto j = json::parse(r.err);
  EXPECT_EQ(j["error"], "divergence");
  EXPECT_FALSE(j["term_norms"].empty());
}

TEST_F(Cli, EquivalentRealizations) {
  const auto r = invoke("equiv --model1 '" + kModels + "/diagonal2.json' --model2 '" + kModels + "/carma21.json' --t 0");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["equivalent"].get<bool>());
  EXPECT_LT(j["max_rel_err"].get<double>(), 1e-10);
}

TEST_F(Cli, ControlReportsRanks) {
  const auto r = invoke("control " + model("controllable.json") + " --tgrid 0,1");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["instantaneous"].get<bool>());
  EXPECT_EQ(j["ranks"], json::array({2, 2}));
}

TEST_F(Cli, SimulateCsvLayout) {
  const auto r = invoke("simulate " + model("carma21.json") + " --N 1 --t0 0 --t1 1 --dt 0.1 --paths 2 --seed 3");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv(r.out);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"path", "time", "x1", "x2", "y"}));
  EXPECT_EQ(rows.size(), 1u + 2u * 11u);
  const auto manifest = json::parse(slurp(path("tvls-manifest.json")));
  EXPECT_EQ(manifest["resolved"]["path_seeds"].size(), 2u);
}

TEST_F(Cli, StructuralBreakTransition) {
  const auto r = invoke("transition " + model("structural_break.json") + " --s0 0 --s 2");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto v = json::parse(r.out)["value"];
  EXPECT_EQ(v.size(), 2u);
}
