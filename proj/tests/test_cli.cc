#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.h"
#include "json.hpp"

using qcsync::cli::run_cli;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) v.push_back(l);
    return v;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> v;
    std::stringstream ss(s);
    for (std::string c; std::getline(ss, c, ',');) v.push_back(c);
    return v;
}

std::string summary(const std::string& out, const std::string& key) {
    for (const auto& l : lines(out))
        if (l.rfind("# " + key + "=", 0) == 0) return l.substr(key.size() + 3);
    return {};
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << body;
    return p;
}

}  // namespace

TEST(Cli, FirstLineCarriesResolvedConfig) {
    const auto r = run({"--seed", "9", "purify", "--f0", "0.8"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto first = lines(r.out).at(0);
    ASSERT_EQ(first.rfind("# qcsync purify {", 0), 0u);
    const auto cfg = nlohmann::json::parse(first.substr(first.find('{')));
    EXPECT_EQ(cfg["seed"], "9");
    EXPECT_EQ(cfg["f0"], "0.8");
}

TEST(Cli, BudgetMinimum) {
    const auto r = run({"budget", "--n-pairs", "100000", "--inv-omega-ps", "17"});
    ASSERT_EQ(r.code, 0) << r.err;
    int best_n = -1;
    double best = 1e300;
    for (const auto& l : lines(r.out)) {
        if (l.empty() || l[0] == '#' || l[0] == 'n') continue;
        const auto c = split(l);
        const double dt = std::stod(c.at(5));
        if (dt < best) best = dt, best_n = std::stoi(c[0]);
    }
    EXPECT_EQ(best_n, 8);
    EXPECT_NEAR(best, 1.5166, 1e-3);
}

TEST(Cli, BudgetOptimizedSweep) {
    const auto r = run({"budget", "--optimized", "--sweep-points", "5", "--f0", "0.9", "0.8"});
    ASSERT_EQ(r.code, 0) << r.err;
    int rows = 0;
    for (const auto& l : lines(r.out))
        if (!l.empty() && l[0] != '#' && l.rfind("n_pairs", 0) != 0) ++rows;
    EXPECT_EQ(rows, 10);
}

TEST(Cli, TwirlCheck) {
    const auto r = run({"twirl-check", "--grid", "20"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LT(std::stod(summary(r.out, "max_twirl_residual")), 1e-10);
    EXPECT_LT(std::stod(summary(r.out, "max_fidelity_residual")), 1e-12);
}

TEST(Cli, QcsSinglePair) {
    const auto r = run({"qcs", "--m", "1", "--trials", "20"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const auto& l : lines(r.out)) {
        if (l.empty() || l[0] == '#' || l[0] == 't') continue;
        const double t = std::stod(split(l).at(3));
        EXPECT_TRUE(t == 0 || std::abs(t - M_PI) < 1e-12) << l;
    }
}

TEST(Cli, QcsMethodsAgreeStatistically) {
    const auto a = run({"qcs", "--m", "20000", "--trials", "8", "--method", "per-qubit"});
    const auto b = run({"qcs", "--m", "20000", "--trials", "8", "--method", "binomial"});
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    EXPECT_NEAR(std::stod(summary(a.out, "mean_t_hat")), 0.3, 0.01);
    EXPECT_NEAR(std::stod(summary(b.out, "mean_t_hat")), 0.3, 0.01);
}

TEST(Cli, SameSeedSameBytes) {
    const std::vector<std::string> args{"--seed", "4", "e2e", "--n-pairs", "512", "--random-frames", "--jitter", "0.01"};
    const auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    auto other = args;
    other[1] = "5";
    EXPECT_NE(run(other).out, a.out);
}

TEST(Cli, ThreadCountDoesNotChangeOutput) {
    const auto a = run({"--threads", "1", "qcs", "--m", "1000", "--trials", "16"});
    const auto b = run({"--threads", "4", "qcs", "--m", "1000", "--trials", "16"});
    ASSERT_EQ(a.code, 0);
    // First line differs only in the threads field.
    auto la = lines(a.out), lb = lines(b.out);
    la.erase(la.begin());
    lb.erase(lb.begin());
    EXPECT_EQ(la, lb);
}

TEST(Cli, E2eReportsFirewallAndBranch) {
    const auto r = run({"e2e", "--n-pairs", "1024"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(summary(r.out, "firewall_clean"), "true");
    EXPECT_EQ(summary(r.out, "branch_ok"), "true");
}

TEST(Cli, JsonOutput) {
    const auto r = run({"--format", "json", "e2e", "--n-pairs", "512", "--mode", "analytic"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.begin().key(), "command");
    EXPECT_EQ(j["command"], "e2e");
    EXPECT_TRUE(j.contains("config"));
    EXPECT_TRUE(j.contains("report"));
}

TEST(Cli, ConfigFileAndPrecedence) {
    const auto cfg = temp_file("qcsync_cfg.json", R"({"f0": 0.7, "rounds": 1})");
    const auto from_file = run({"--config", cfg.string(), "purify"});
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    auto cfg_line = nlohmann::json::parse(lines(from_file.out)[0].substr(lines(from_file.out)[0].find('{')));
    EXPECT_EQ(cfg_line["f0"], "0.7");
    EXPECT_EQ(cfg_line["rounds"], "1");

    const auto overridden = run({"--config", cfg.string(), "purify", "--f0", "0.95"});
    cfg_line = nlohmann::json::parse(lines(overridden.out)[0].substr(lines(overridden.out)[0].find('{')));
    EXPECT_EQ(cfg_line["f0"], "0.95");
    EXPECT_EQ(cfg_line["rounds"], "1");
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"nonsense"}).code, 2);
    EXPECT_EQ(run({"purify", "--f0", "abc"}).code, 2);
    EXPECT_EQ(run({"e2e", "--latency", "-1"}).code, 2);
    const auto bad = temp_file("qcsync_bad.json", R"({"no_such_key": 1})");
    const auto unknown = run({"--config", bad.string(), "purify"});
    EXPECT_EQ(unknown.code, 2);
    EXPECT_NE(unknown.err.find("no_such_key"), std::string::npos);

    const auto refused = run({"e2e", "--p", "0.9"});
    EXPECT_EQ(refused.code, 3);
    EXPECT_NE(refused.err.find("0.5"), std::string::npos);
    EXPECT_EQ(run({"e2e", "--alice-frame", "2", "0"}).code, 3);
    EXPECT_EQ(run({"e2e", "--n-pairs", "16", "--rounds", "6"}).code, 3);
}

TEST(Cli, OutFile) {
    const auto p = std::filesystem::temp_directory_path() / "qcsync_out.csv";
    std::filesystem::remove(p);
    const auto r = run({"--out", p.string(), "twirl-check", "--grid", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(p);
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first.rfind("# qcsync twirl-check", 0), 0u);
}
