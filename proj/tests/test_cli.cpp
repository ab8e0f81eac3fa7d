#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hcont_app.hpp"

namespace {

namespace fs = std::filesystem;

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "hcont_cli");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = hcont::cli::main_entry(int(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("hcont_cli_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        for (auto c : hcont::detail::split(line, ',')) cells.emplace_back(c);
        rows.push_back(cells);
    }
    return rows;
}

TEST(Cli, EigsWritesSpectrumRatesAndManifest) {
    const auto d = scratch_dir("eigs");
    const auto r = run_cli({"eigs", "segment:-1,1@h=1", "--n", "80", "--mode", "dd", "--output", (d / "eigs.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(slurp(d / "eigs.csv"));
    ASSERT_GT(rows.size(), 20u);
    EXPECT_EQ(rows[0][0], "n");
    EXPECT_EQ(rows[0][1], "lambda");
    EXPECT_EQ(rows[0][2], "ln_lambda");
    const auto rates = nlohmann::json::parse(slurp(d / "eigs.rates.json"));
    for (const char* key : {"ln_rho_gamma", "widom_W", "widom_2W", "rho1", "alpha_hat"}) EXPECT_TRUE(rates.contains(key)) << key;
    const auto m = nlohmann::json::parse(slurp(d / "eigs.manifest.json"));
    EXPECT_EQ(m["mode"], "dd");
    EXPECT_EQ(m["config_hash"].get<std::string>().size(), 16u);
    EXPECT_GT(m["rank_cutoff"].get<int>(), 20);
}

TEST(Cli, BoundJsonHasDocumentedKeys) {
    const auto r = run_cli({"bound", "segment:-1,1@h=1", "--z", "2+1i", "--eps", "1e-6", "--n", "60", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j.size(), 1u);
    for (const char* key : {"eps", "z", "u_at_z", "norm_L2_Gamma", "norm_H2", "M", "branch_UB1", "branch_UB2",
                            "eta_star_ratio", "truncation_bound"})
        EXPECT_TRUE(j[0].contains(key)) << key;
}

TEST(Cli, CsvCellsRoundTripAt33Digits) {
    const auto r = run_cli({"bound", "segment:-1,1@h=1", "--z", "2+1i", "--eps", "1e-8..1e-6", "--n", "60"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 1u + 9u);
    const std::string cell = rows[1][7];
    const auto v = hcont::parse_scalar<hcont::DDReal>(cell);
    EXPECT_EQ(hcont::to_string(v), cell);
    EXPECT_GE(cell.size(), 38u);
}

TEST(Cli, DeterministicAcrossRunsAndJobCounts) {
    const auto d = scratch_dir("det");
    const std::vector<std::string> base{"powerlaw", "segment:-1,1@h=0.5", "--z", "1.5+0.5i,2+0.5i,3+0.5i",
                                        "--eps",    "1e-12..1e-3",         "--n", "60"};
    auto with = [&](const std::string& out, const std::string& jobs) {
        auto a = base;
        a.insert(a.end(), {"--output", (d / out).string(), "--jobs", jobs});
        return run_cli(a);
    };
    ASSERT_EQ(with("a.csv", "1").code, 0);
    ASSERT_EQ(with("b.csv", "1").code, 0);
    ASSERT_EQ(with("c.csv", "3").code, 0);
    EXPECT_EQ(slurp(d / "a.csv"), slurp(d / "b.csv"));
    EXPECT_EQ(slurp(d / "a.csv"), slurp(d / "c.csv"));
    EXPECT_EQ(slurp(d / "a.fit.csv"), slurp(d / "c.fit.csv"));
    const auto ma = nlohmann::json::parse(slurp(d / "a.manifest.json"));
    const auto mc = nlohmann::json::parse(slurp(d / "c.manifest.json"));
    EXPECT_EQ(ma["config_hash"], mc["config_hash"]);
    const auto fit = parse_csv(slurp(d / "a.fit.csv"));
    EXPECT_EQ(fit[0], (std::vector<std::string>{"x", "gamma_hat", "theta", "r2"}));
    ASSERT_EQ(fit.size(), 4u);
}

TEST(Cli, BoundaryJson) {
    const auto r = run_cli({"boundary", "--z", "1+1i", "--eps", "1e-6", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    for (const char* key : {"gamma", "rho", "bound", "B"}) EXPECT_TRUE(j.contains(key)) << key;
    const double g = std::stod(j["gamma"].get<std::string>());
    EXPECT_NEAR(g, std::atan(2.0) / std::numbers::pi, 1e-15);
}

TEST(Cli, BoundaryExponentMapCsv) {
    const auto r = run_cli({"boundary", "--z", "0+1i,1+1i,2+0.5i"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"zr", "zi", "gamma", "rho"}));
}

TEST(Cli, TransplantAndRates) {
    const auto t = run_cli({"transplant", "--x", "1,2"});
    ASSERT_EQ(t.code, 0) << t.err;
    EXPECT_EQ(parse_csv(t.out).size(), 3u);
    const auto r = run_cli({"rates", "segment:0,4@h=2", "--n", "60", "--mode", "f64"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("ln_rho_gamma,2.96967943888"), std::string::npos) << r.out;
}

TEST(Cli, ConfigFileWithFlagOverride) {
    const auto d = scratch_dir("cfg");
    {
        std::ofstream f(d / "run.json");
        f << R"({"command":"bound","curve":"segment:-1,1@h=1","z":["2+1i"],"eps":{"min":1e-6,"max":1e-6},"n":40,"mode":"f64","format":"json"})";
    }
    const auto a = run_cli({"--config", (d / "run.json").string()});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(std::stod(nlohmann::json::parse(a.out)[0]["eps"].get<std::string>()), 1e-6);
    const auto b = run_cli({"bound", "--config", (d / "run.json").string(), "--eps", "1e-4"});
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(std::stod(nlohmann::json::parse(b.out)[0]["eps"].get<std::string>()), 1e-4);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli({"bound", "segment:-1,1@h=1", "--z", "0.5+1i", "--eps", "1e-3"}).code, 1);
    EXPECT_EQ(run_cli({"bound", "segment:-1,1@h=1", "--z", "2+1i", "--eps", "1e-10", "--mode", "f64"}).code, 1);
    EXPECT_EQ(run_cli({"bound", "segment:-1,1@h=1", "--z", "2+1i", "--eps", "1e-17"}).code, 1);
    EXPECT_EQ(run_cli({"eigs", "segment:1,-1@h=1"}).code, 1);
    EXPECT_EQ(run_cli({"eigs", "segment:-1,1@h=1", "--bogus"}).code, 1);
    EXPECT_EQ(run_cli({}).code, 1);
    EXPECT_EQ(run_cli({"boundary", "--z", "0+1i", "--eps", "1e-3", "--h-limit", "1e-10"}).code, 2);
    EXPECT_EQ(run_cli({"transplant", "--output", "/nonexistent_dir/x.csv"}).code, 3);
    EXPECT_EQ(run_cli({"--config", "/nonexistent_dir/cfg.json"}).code, 3);
}

}  // namespace
