#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "qsm/cli/commands.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run qsm_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = qsm::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct Csv {
  std::vector<std::string> meta;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return c;
    throw std::runtime_error("no column " + name);
  }
  std::vector<double> column(const std::string& name) const {
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r[col(name)]);
    return out;
  }
  std::string meta_value(const std::string& key) const {
    for (const auto& m : meta)
      if (m.rfind("# " + key + ": ", 0) == 0) return m.substr(key.size() + 4);
    return {};
  }
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      csv.meta.push_back(line);
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (csv.header.empty()) {
      csv.header = cells;
    } else {
      std::vector<double> row;
      for (const auto& c : cells) row.push_back(std::strtod(c.c_str(), nullptr));
      csv.rows.push_back(row);
    }
  }
  return csv;
}

std::string recipe(const char* name) { return std::string(QSM_SOURCE_DIR) + "/recipes/" + name; }

}  // namespace

TEST(Cli, HelpAndUsage) {
  const auto help = qsm_run({"--help"});
  EXPECT_EQ(help.code, 0);
  for (const char* cmd : {"rate", "measure", "holevo", "blp", "divisibility", "classical-sim", "kernel-check"})
    EXPECT_NE(help.out.find(cmd), std::string::npos) << cmd;
  EXPECT_EQ(qsm_run({}).code, 2);
  EXPECT_EQ(qsm_run({"frobnicate"}).code, 2);
  const auto rate_help = qsm_run({"rate", "--help"});
  EXPECT_EQ(rate_help.code, 0);
  EXPECT_NE(rate_help.out.find("--t-max"), std::string::npos);
  EXPECT_EQ(qsm_run({"--version"}).out, "qsm " QSM_VERSION "\n");
}

TEST(Cli, ConfigErrorsExitWithTwo) {
  EXPECT_EQ(qsm_run({"rate", "--no-such-flag"}).code, 2);
  EXPECT_EQ(qsm_run({"rate", "--grid", "1"}).code, 2);
  EXPECT_EQ(qsm_run({"rate", "--format", "xml"}).code, 2);
  EXPECT_EQ(qsm_run({"rate", "--lambda1", "1"}).code, 2);
  EXPECT_EQ(qsm_run({"rate", "--lambda1", "1", "--lambda2", "2", "--s", "3"}).code, 2);
  EXPECT_EQ(qsm_run({"rate", "--s", "-1"}).code, 2);
  EXPECT_EQ(qsm_run({"classical-sim"}).code, 2);
  EXPECT_EQ(qsm_run({"holevo", "--family", "nonunital"}).code, 2);
  EXPECT_EQ(qsm_run({"rate", "--config", "/nonexistent/file.cfg"}).code, 2);
}

TEST(Cli, NumericalFailureExitsWithThree) {
  const auto r = qsm_run({"measure", "--p", "3", "--epsilon", "1e-300"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("numerical failure"), std::string::npos);
}

TEST(Cli, RateFig1) {
  const auto r = qsm_run({"rate", "--s", "1", "--p", "3", "--t-max", "6", "--grid", "600"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  EXPECT_EQ(csv.rows.size(), 600u);
  EXPECT_EQ(csv.meta_value("regime"), "cp-indivisible");
  EXPECT_EQ(csv.meta_value("singularities").substr(0, 12), "0.7407955218");
  // The grid point nearest the first zero of q carries the spike.
  const auto t = csv.column("t"), g = csv.column("gamma");
  double spike = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (std::abs(t[k] - 0.7407955) < 0.011) spike = std::max(spike, std::abs(g[k]));
  EXPECT_GT(spike, 50.0);
}

TEST(Cli, RateZeroP) {
  const auto csv = parse_csv(qsm_run({"rate", "--s", "1", "--p", "0", "--grid", "50"}).out);
  for (double g : csv.column("gamma")) EXPECT_EQ(g, 0.0);
  for (double q : csv.column("q")) EXPECT_EQ(q, 1.0);
}

TEST(Cli, RateParametrisationsAgree) {
  const auto a = qsm_run({"rate", "--lambda1", "1", "--lambda2", "2", "--grid", "40", "--t-max", "4"});
  const auto b = qsm_run({"rate", "--s", "3", "--p", "2", "--grid", "40", "--t-max", "4"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.find("lambda1"), std::string::npos);
}

TEST(Cli, RateNonUnital) {
  const auto csv = parse_csv(qsm_run({"rate", "--family", "nonunital", "--lambda", "1", "--grid", "11", "--t-max", "1"}).out);
  EXPECT_NEAR(csv.rows.back()[csv.col("gamma")], std::tanh(1.0), 1e-11);
  EXPECT_NEAR(csv.rows.back()[csv.col("survival")], 1.0 / std::cosh(1.0), 1e-11);
}

TEST(Cli, MeasureNonUnitalClosedForm) {
  for (const char* lambda : {"0.5", "1", "2"}) {
    const auto r = qsm_run({"measure", "--family", "nonunital", "--lambda", lambda, "--mode", "paper", "--T", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto csv = parse_csv(r.out);
    const double l = std::stod(lambda);
    EXPECT_NEAR(csv.rows[0][csv.col("xi")], std::log(std::cosh(l)), 1e-6 * std::log(std::cosh(l)));
  }
}

TEST(Cli, MeasureFig2Sweep) {
  const auto r = qsm_run({"measure", "--config", recipe("fig2.cfg")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  ASSERT_EQ(csv.rows.size(), 51u);
  const auto p = csv.column("p"), zeta = csv.column("zeta"), flag = csv.column("cp_indivisible");
  EXPECT_EQ(zeta[0], 0.0);
  for (std::size_t k = 1; k < zeta.size(); ++k) EXPECT_GE(zeta[k], zeta[k - 1]);
  for (std::size_t k = 0; k < p.size(); ++k) EXPECT_EQ(flag[k], p[k] > 0.125 ? 1.0 : 0.0) << p[k];
}

TEST(Cli, MeasureChoiForm) {
  const auto r = qsm_run({"measure", "--family", "nonunital", "--lambda", "1", "--form", "choi"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  EXPECT_NEAR(std::stod(csv.meta_value("family_constant")), 1.0 + std::sqrt(5.0), 1e-9);
  EXPECT_NEAR(csv.rows[0][csv.col("xi_normalized")], std::log(std::cosh(1.0)), 1e-8);
  const auto d3 = parse_csv(qsm_run({"measure", "--p", "0.1", "--form", "choi", "--dim", "3"}).out);
  EXPECT_NEAR(std::stod(d3.meta_value("family_constant")), 2.0, 1e-9);
}

TEST(Cli, MeasureTrueMinimum) {
  const auto csv = parse_csv(qsm_run({"measure", "--family", "nonunital", "--lambda", "1", "--mode", "min"}).out);
  EXPECT_NEAR(csv.rows[0][csv.col("gamma_ref")], std::tanh(0.5), 1e-6);
  EXPECT_TRUE(std::isnan(csv.rows[0][csv.col("closed_form")]));
}

TEST(Cli, HolevoFig3) {
  const auto r = qsm_run({"holevo", "--config", recipe("fig3.cfg")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  ASSERT_EQ(csv.header.size(), 4u);
  for (const char* name : {"chi_p=2", "chi_p=0.1", "chi_p=0.01"}) EXPECT_NEAR(csv.rows[0][csv.col(name)], 1.0, 1e-9);
  const auto c2 = csv.column("chi_p=2");
  bool revives = false;
  for (std::size_t k = 1; k < c2.size(); ++k) revives |= c2[k] > c2[k - 1];
  EXPECT_TRUE(revives);
}

TEST(Cli, BlpAndDivisibility) {
  const auto blp = parse_csv(qsm_run({"blp", "--s", "1", "--p", "0.1", "--t-max", "10"}).out);
  EXPECT_EQ(blp.rows[0][blp.col("blp")], 0.0);
  const auto blp3 = parse_csv(qsm_run({"blp", "--s", "1", "--p", "3"}).out);
  EXPECT_GT(blp3.rows[0][blp3.col("blp")], 0.01);

  const auto div = parse_csv(qsm_run({"divisibility", "--s", "1", "--boundary-search"}).out);
  EXPECT_NEAR(div.rows[0][div.col("p_star")], 0.125, 2e-3);
  const auto scan = qsm_run({"divisibility", "--s", "1", "--p", "0.1", "--t-max", "10", "--grid", "1001"});
  EXPECT_EQ(parse_csv(scan.out).meta_value("divisible"), "yes");
}

TEST(Cli, KernelCheck) {
  const auto r = qsm_run({"kernel-check", "--s", "1", "--p", "3", "--dt", "1e-3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  EXPECT_LE(std::stod(csv.meta_value("max_deviation")), 1e-4);
  EXPECT_NEAR(std::stod(csv.meta_value("order")), 2.0, 0.2);
  EXPECT_NE(r.err.find("order"), std::string::npos);
}

TEST(Cli, ClassicalSimIsDeterministic) {
  const std::vector<std::string> base = {"classical-sim", "--seed", "77", "--wtd", "expconv", "--paths", "5000",
                                         "--grid", "21"};
  auto one = base, four = base;
  one.insert(one.end(), {"--threads", "1"});
  four.insert(four.end(), {"--threads", "4"});
  const auto a = qsm_run(one), b = qsm_run(four);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(parse_csv(a.out).meta_value("config.seed"), "77");
}

TEST(Cli, CsvIsDeterministic) {
  const auto a = qsm_run({"measure", "--grid", "11", "--mode", "min"});
  const auto b = qsm_run({"measure", "--grid", "11", "--mode", "min"});
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ConfigFileAndOverride) {
  const auto from_file = parse_csv(qsm_run({"rate", "--config", recipe("fig1.cfg")}).out);
  EXPECT_EQ(from_file.rows.size(), 600u);
  EXPECT_EQ(from_file.meta_value("config.p"), "3");
  const auto overridden = parse_csv(qsm_run({"rate", "--config", recipe("fig1.cfg"), "--p", "0.1"}).out);
  EXPECT_EQ(overridden.meta_value("config.p"), "0.1");
  EXPECT_EQ(overridden.meta_value("regime"), "cp-divisible");

  const auto bad = std::filesystem::temp_directory_path() / "qsm_bad.cfg";
  std::ofstream(bad) << "not-a-flag = 3\n";
  EXPECT_EQ(qsm_run({"rate", "--config", bad.string()}).code, 2);
  std::filesystem::remove(bad);
}

TEST(Cli, JsonSchema) {
  const auto r = qsm_run({"rate", "--s", "1", "--p", "3", "--grid", "5", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["command"], "rate");
  EXPECT_EQ(j["config"]["s"], 1.0);
  EXPECT_EQ(j["metadata"]["version"], QSM_VERSION);
  EXPECT_TRUE(j["metadata"]["singularities"].is_array());
  EXPECT_TRUE(j["metadata"]["excised"].is_array());
  ASSERT_EQ(j["columns"]["t"].size(), 5u);
  // Same numbers as the CSV.
  const auto csv = parse_csv(qsm_run({"rate", "--s", "1", "--p", "3", "--grid", "5"}).out);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(j["columns"]["gamma"][k].get<double>(), csv.rows[k][csv.col("gamma")]);

  const auto m = nlohmann::json::parse(qsm_run({"measure", "--p", "3", "--format", "json"}).out);
  ASSERT_EQ(m["metadata"]["excised"].size(), 1u);
  EXPECT_NEAR(m["metadata"]["excised"][0][0].get<double>(), 0.7407945, 1e-6);
}

TEST(Cli, SvgOutput) {
  const auto r = qsm_run({"holevo", "--grid", "50", "--format", "svg"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("<?xml", 0), 0u);
  EXPECT_NE(r.out.find("</svg>"), std::string::npos);
  std::size_t groups = 0;
  for (std::size_t pos = 0; (pos = r.out.find("class=\"series\"", pos)) != std::string::npos; ++pos) ++groups;
  EXPECT_EQ(groups, 3u);
  // The embedded table is the CSV output verbatim.
  const auto csv = qsm_run({"holevo", "--grid", "50"}).out;
  EXPECT_NE(r.out.find(csv), std::string::npos);

  const auto rate = qsm_run({"rate", "--format", "svg"});
  EXPECT_NE(rate.out.find("<polyline"), std::string::npos);
}

TEST(Cli, OutputFile) {
  const auto path = std::filesystem::temp_directory_path() / "qsm_out_test.csv";
  const auto r = qsm_run({"rate", "--grid", "5", "--out", path.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), qsm_run({"rate", "--grid", "5"}).out);
  std::filesystem::remove(path);
}
