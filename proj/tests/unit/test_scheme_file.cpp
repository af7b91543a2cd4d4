#include <gtest/gtest.h>

#include <sstream>

#include "latsym/catalog/catalog.hpp"
#include "latsym/lattice/scheme_file.hpp"

using namespace latsym;
using namespace latsym::lattice;

namespace {

const char* kHeat = R"J({
  "name": "my_heat",
  "stencil": {"i1": 1, "i2": 1, "j1": 0, "j2": 1},
  "residuals": ["x[1,0]-x-h1", "t[1,0]-t", "x[0,1]-x", "t[0,1]-t-h2",
                "(u[0,1]-u)/h2 - (u[1,0]-2*u+u[-1,0])/h1^2"],
  "params": {"h1": 1.0, "h2": 0.25},
  "solve_for": ["x[1,0]", "t[1,0]", "x[0,1]", "t[0,1]", "u[0,1]"],
  "seed": {"rows": 1, "x": "h1*m", "t": "h2*n", "u": "sin(0.5*x)"},
  "window": {"m": [0, 9], "n": [0, 6]}
})J";

}  // namespace

TEST(SchemeFile, LoadsAndPropagates) {
    std::istringstream in(kHeat);
    auto f = read_scheme(in);
    EXPECT_EQ(f.scheme.name(), "my_heat");
    ASSERT_TRUE(f.window.has_value());
    EXPECT_EQ(f.window->m_hi, 9);
    EXPECT_EQ(dsl::to_string(f.scheme.solve_for()[4]), "u[0,1]");
    auto g = propagate_grid(f.scheme, make_seed(f.scheme, *f.window), *f.window);
    for (double r : max_residuals(f.scheme, g)) EXPECT_LE(r, 1e-9);
    EXPECT_DOUBLE_EQ(g.at(3, 4)[0], 3.0);
    EXPECT_DOUBLE_EQ(g.at(3, 4)[1], 1.0);
}

TEST(SchemeFile, DefaultSolveForIsFarCorner) {
    std::istringstream in(R"J({
      "name": "wave", "light_cone": true,
      "stencil": {"i1": 1, "i2": 1, "j1": 1, "j2": 1},
      "residuals": ["x[1,0]-2*x+x[-1,0]", "x[0,1]-x", "y[0,1]-2*y+y[0,-1]", "y[1,0]-y",
                    "(u[1,1]-u[0,1]-u[1,0]+u)/((x[1,0]-x)*(y[0,1]-y)) - 1"]})J");
    auto f = read_scheme(in);
    EXPECT_EQ(f.scheme.solve_for(), default_solve_for(f.scheme.bounds()));
    EXPECT_TRUE(f.scheme.light_cone());
    EXPECT_FALSE(f.window.has_value());
}

TEST(SchemeFile, RoundTripsCatalogSchemes) {
    for (const auto& e : catalog::reference_runs()) {
        std::ostringstream out;
        write_scheme(out, e.scheme, e.window);
        std::istringstream in(out.str());
        auto f = read_scheme(in);
        EXPECT_EQ(f.scheme.name(), e.scheme.name());
        EXPECT_EQ(f.scheme.params(), e.scheme.params());
        EXPECT_EQ(f.scheme.solve_for(), e.scheme.solve_for());
        EXPECT_EQ(f.scheme.light_cone(), e.scheme.light_cone());
        for (int a = 0; a < kResidualCount; ++a) EXPECT_TRUE(f.scheme.residual(a) == e.scheme.residual(a)) << e.label << a;
        std::ostringstream again;
        write_scheme(again, f.scheme, f.window);
        EXPECT_EQ(again.str(), out.str()) << e.label;
    }
}

TEST(SchemeFile, RejectsMalformedInput) {
    auto bad = [](const std::string& text) {
        std::istringstream in(text);
        EXPECT_THROW(read_scheme(in), SchemeFileError) << text;
    };
    bad("{not json");
    bad(R"J({"name": "a", "stencil": {"i1": 1, "i2": 1, "j1": 0, "j2": 1}, "residuals": ["x", "t"]})J");
    bad(R"J({"name": "a", "stencil": {"i1": 0, "i2": 0, "j1": 0, "j2": 1},
            "residuals": ["x[1,0]-x", "t", "x[0,1]", "t[0,1]", "u[0,1]"]})J");
    bad(R"J({"name": "a", "stencil": {"i1": 1, "i2": 1, "j1": 0, "j2": 1},
            "residuals": ["x[1,0]-x-1", "t[1,0]-t", "x[0,1]-x", "t[0,1]-t-1", "u[0,1]-u-(1"]})J");
    bad(R"J({"name": "a", "stencil": {"i1": 1, "i2": 1, "j1": 0, "j2": 1},
            "residuals": ["x[1,0]-x-1", "t[1,0]-t", "x[0,1]-x", "t[0,1]-t-1", "u[0,1]-u"],
            "solve_for": ["x[1,0]", "t[1,0]", "x[0,1]", "t[0,1]", "2*u[0,1]"]})J");
    EXPECT_THROW(read_scheme_file("/nonexistent/scheme.json"), SchemeFileError);
}
