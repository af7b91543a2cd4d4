#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "latsym/catalog/catalog.hpp"
#include "latsym/cli/cli.hpp"
#include "latsym/cli/io.hpp"
#include "latsym/lattice/scheme_file.hpp"

using namespace latsym;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("latsym_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                           "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name)) << text;
        return path(name);
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, ListsEveryScheme) {
    auto r = run({"list"});
    EXPECT_EQ(r.code, 0);
    for (const auto& id : catalog::scheme_ids()) EXPECT_NE(r.out.find(id), std::string::npos) << id;
}

TEST_F(CliTest, FindsLinearizableBurgersAlgebra) {
    auto r = run({"find", "--scheme", "burgers_linearizable", "--deg-x", "2", "--deg-t", "2", "--deg-u", "1", "--samples",
                  "300", "--seed", "42", "--json", "--out", path("f.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    const auto& res = j["deterministic"]["results"];
    EXPECT_EQ(res["dimension"]["finite"], 3);
    EXPECT_EQ(res["dimension"]["superposition"], 0);
    EXPECT_LE(res["held_out_max"].get<double>(), 1e-7);
    EXPECT_TRUE(res["finite_structure"]["closed"].get<bool>());
    EXPECT_TRUE(j.contains("timing"));
    std::ifstream f(path("f.txt"));
    EXPECT_EQ(cli::read_fields(f).size(), 3u);
}

TEST_F(CliTest, UnknownSchemeIsUsageError) {
    auto r = run({"find", "--scheme", "no_such_scheme"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("heat_fixed"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"find", "--scheme", "heat_fixed", "--bogus"}).code, 2);
    EXPECT_EQ(run({"find"}).code, 2);
    EXPECT_EQ(run({"lattice", "--scheme", "heat_fixed", "--m-range", "5:1"}).code, 2);
    EXPECT_EQ(run({"lattice", "--scheme", "heat_fixed", "--param", "h1"}).code, 2);
    EXPECT_EQ(run({"lattice", "--scheme", "heat_fixed", "--param", "h1=-1"}).code, 2);
    EXPECT_EQ(run({"verify", "--scheme", "heat_fixed"}).code, 2);
    EXPECT_EQ(run({"verify", "--scheme", "heat_fixed", "--field", path("missing.txt")}).code, 2);
    EXPECT_EQ(run({"flow", "--scheme", "heat_fixed", "--field", write("f", "xi = 1")}).code, 2);
    EXPECT_EQ(run({"limit", "--scheme", "heat_exponential"}).code, 2);
    EXPECT_EQ(run({"lattice", "--scheme", "heat_fixed", "--scheme-file", path("s.json")}).code, 2);
    EXPECT_EQ(run({"lattice", "--scheme", "heat_fixed", "--out", path("no/such/dir/x.csv")}).code, 2);
}

TEST_F(CliTest, LatticeExportsExponentialPattern) {
    const double c = 1.41421356, alpha = 3.14159265;
    auto r = run({"lattice", "--scheme", "heat_exponential", "--param", "c=1.41421356", "--param", "h=1", "--param",
                  "alpha=3.14159265", "--param", "beta=0", "--param", "t0=0", "--m-range", "0:8", "--n-range", "0:8",
                  "--out", path("pts.csv"), "--svg", path("pts.svg")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream csv(path("pts.csv"));
    auto g = lattice::read_csv(csv);
    EXPECT_EQ(g.window().width(), 9);
    for (int n = 0; n <= 8; ++n) {
        for (int m = 0; m <= 8; ++m) {
            const double x = std::pow(1 + c, n) * alpha * m;
            EXPECT_NEAR(g.at(m, n)[0], x, 1e-12 * std::max(1.0, x));
            EXPECT_NEAR(g.at(m, n)[1], n, 1e-12);
        }
    }
    std::ifstream svg(path("pts.svg"));
    auto pts = cli::read_svg(svg);
    ASSERT_EQ(pts.size(), 81u);
    for (const auto& p : pts) {
        EXPECT_EQ(p.x, g.at(p.m, p.n)[0]);
        EXPECT_EQ(p.t, g.at(p.m, p.n)[1]);
    }
}

TEST_F(CliTest, VerifySeparatesSymmetriesFromNonSymmetries) {
    const auto fields = write("g.txt", "P1: xi = 1; tau = 0; phi = 0\nB: xi = t; tau = 0; phi = 0\n");
    EXPECT_EQ(run({"verify", "--scheme", "heat_galilei", "--field", fields}).code, 0);
    auto r = run({"verify", "--scheme", "heat_fixed", "--field", fields, "--json"});
    EXPECT_EQ(r.code, 3);
    auto j = json::parse(r.out);
    EXPECT_FALSE(j["deterministic"]["results"]["all_symmetries"].get<bool>());
}

TEST_F(CliTest, FlowWritesReadableGrid) {
    const auto fields = write("b.txt", "B: xi = t; tau = 0; phi = 0\n");
    auto r = run({"flow", "--scheme", "heat_galilei", "--field", fields, "--lambda", "0.5", "--m-range", "0:9",
                  "--n-range", "0:9", "--out", path("t.csv"), "--svg", path("t.svg")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream csv(path("t.csv"));
    auto g = lattice::read_csv(csv);
    auto e = catalog::instantiate("heat_galilei");
    for (double v : lattice::max_residuals(e.scheme, g)) EXPECT_LE(v, 1e-8);
    std::ifstream svg(path("t.svg"));
    EXPECT_EQ(cli::read_svg(svg).size(), 200u);
    // the boosted grid read back from CSV can be flowed again
    EXPECT_EQ(run({"flow", "--scheme", "heat_galilei", "--field", fields, "--lambda", "-0.5", "--grid", path("t.csv")}).code, 0);
    EXPECT_EQ(run({"flow", "--scheme", "heat_fixed", "--field", fields, "--lambda", "0.5"}).code, 3);
}

TEST_F(CliTest, LimitReportsGalileiPde) {
    auto r = run({"limit", "--scheme", "heat_galilei", "--param", "sigma=2", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto res = json::parse(r.out)["deterministic"]["results"];
    EXPECT_NEAR(res["coefficients"]["u_xt"].get<double>(), -1.0, 1e-3);
    EXPECT_NEAR(res["coefficients"]["u_tt"].get<double>(), -0.25, 1e-3);
    EXPECT_LE(res["change_of_variables"]["residual"].get<double>(), 1e-8);
    EXPECT_GT(res["change_of_variables"]["negative_control"].get<double>(), 1e-2);
}

TEST_F(CliTest, BracketAndSpanEscape) {
    auto ok = run({"bracket", "--field", write("d.txt", "P0: tau = 1\nD: xi = x; tau = 2*t\n"), "--json"});
    ASSERT_EQ(ok.code, 0) << ok.err;
    auto j = json::parse(ok.out)["deterministic"]["results"];
    EXPECT_EQ(j["brackets"][0]["bracket"], "xi = 0; tau = 2; phi = 0");
    EXPECT_NEAR(j["structure"]["brackets"][0]["bracket"]["P0"].get<double>(), 2.0, 1e-12);
    EXPECT_EQ(run({"bracket", "--field", write("e.txt", "a: xi = x^2\nb: phi = x^2\n")}).code, 3);
    EXPECT_EQ(run({"bracket", "--field", write("one.txt", "a: xi = 1\n")}).code, 2);
}

TEST_F(CliTest, SchemeFileRunsLikeCatalogScheme) {
    auto e = catalog::instantiate("heat_fixed");
    {
        std::ofstream f(path("s.json"));
        lattice::write_scheme(f, e.scheme, e.window);
    }
    auto r = run({"find", "--scheme-file", path("s.json"), "--json", "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto res = json::parse(r.out)["deterministic"]["results"];
    EXPECT_EQ(res["dimension"]["finite"], 3);
    EXPECT_EQ(res["dimension"]["superposition"], 3);
    EXPECT_EQ(run({"lattice", "--scheme-file", path("s.json"), "--param", "h1=0.5"}).code, 0);
    EXPECT_EQ(run({"lattice", "--scheme-file", path("s.json"), "--param", "nope=1"}).code, 2);
}

TEST_F(CliTest, DeterministicSectionIsReproducible) {
    for (const auto& cmd : std::vector<std::vector<std::string>>{
             {"find", "--scheme", "heat_galilei", "--seed", "11"},
             {"find", "--scheme", "lorentz", "--param", "f=exp", "--seed", "5", "--samples", "150"},
             {"limit", "--scheme", "burgers_potential"}}) {
        auto args = cmd;
        args.push_back("--report");
        args.push_back(path("a.json"));
        ASSERT_EQ(run(args).code, 0);
        args.back() = path("b.json");
        ASSERT_EQ(run(args).code, 0);
        auto a = json::parse(std::ifstream(path("a.json")));
        auto b = json::parse(std::ifstream(path("b.json")));
        EXPECT_EQ(a["deterministic"].dump(), b["deterministic"].dump()) << cmd[0] << " " << cmd[2];
    }
}

TEST(FieldFile, RoundTrip) {
    std::istringstream in("# comment\n\nP1: xi = 1; tau = 0; phi = 0\nxi = t\n");
    auto f = cli::read_fields(in);
    ASSERT_EQ(f.size(), 2u);
    EXPECT_EQ(f[0].name, "P1");
    EXPECT_EQ(f[1].name, "X2");
    std::ostringstream out;
    cli::write_fields(out, f);
    std::istringstream again(out.str());
    auto g = cli::read_fields(again);
    EXPECT_EQ(g[1].text, f[1].text);
    std::istringstream empty("# nothing\n");
    EXPECT_THROW(cli::read_fields(empty), std::invalid_argument);
}
