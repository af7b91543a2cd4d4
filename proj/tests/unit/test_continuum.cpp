#include <gtest/gtest.h>

#include <cmath>

#include "latsym/catalog/catalog.hpp"
#include "latsym/continuum/continuum.hpp"
#include "latsym/errors.hpp"

using namespace latsym;
using namespace latsym::continuum;

namespace {

double rel(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

}  // namespace

TEST(TestFunction, JetMatchesClosedForm) {
    TestFunction f("sin(x)*exp(-t/2) + 0.3*x*t");
    const double x = 0.7, t = 0.4;
    const Jet j = f.jet(x, t);
    EXPECT_NEAR(j.u, std::sin(x) * std::exp(-t / 2) + 0.3 * x * t, 1e-15);
    EXPECT_NEAR(j.u_x, std::cos(x) * std::exp(-t / 2) + 0.3 * t, 1e-15);
    EXPECT_NEAR(j.u_t, -0.5 * std::sin(x) * std::exp(-t / 2) + 0.3 * x, 1e-15);
    EXPECT_NEAR(j.u_xx, -std::sin(x) * std::exp(-t / 2), 1e-15);
    EXPECT_NEAR(j.u_xt, -0.5 * std::cos(x) * std::exp(-t / 2) + 0.3, 1e-15);
    EXPECT_NEAR(j.u_tt, 0.25 * std::sin(x) * std::exp(-t / 2), 1e-15);
    EXPECT_THROW(TestFunction("u + x"), std::invalid_argument);
}

TEST(Limit, HeatFixedIsHeatEquation) {
    auto e = catalog::instantiate("heat_fixed");
    auto fit = leading_order_coefficients(e);
    for (const auto& [term, c] : fit.coefficients) {
        const double want = term == "u_t" ? 1.0 : term == "u_xx" ? -1.0 : 0.0;
        EXPECT_LE(std::abs(c - want), 1e-6) << term;
    }
    EXPECT_GE(fit.order, 0.9);
}

TEST(Limit, GalileiLatticeGivesMixedDerivatives) {
    for (double sigma : {2.0, 1.0, -3.0}) {
        auto e = catalog::instantiate("heat_galilei", std::map<std::string, double>{{"sigma", sigma}});
        auto fit = leading_order_coefficients(e);
        EXPECT_LE(rel(fit.coefficients.at("u_t"), 1.0), 1e-3);
        EXPECT_LE(rel(fit.coefficients.at("u_xx"), -1.0), 1e-3);
        EXPECT_LE(rel(fit.coefficients.at("u_xt"), -2.0 / sigma), 1e-3) << sigma;
        EXPECT_LE(rel(fit.coefficients.at("u_tt"), -1.0 / (sigma * sigma)), 1e-3) << sigma;
        EXPECT_LE(std::abs(fit.coefficients.at("u_x")), 1e-3);
        EXPECT_LE(std::abs(fit.coefficients.at("u")), 1e-3);
        EXPECT_LE(std::abs(fit.coefficients.at("1")), 1e-3);
        EXPECT_GE(fit.order, 0.9);
    }
}

TEST(Limit, EveryScaledEntryMatchesItsExpectedPde) {
    for (const auto& e : catalog::reference_runs()) {
        if (!e.continuum) continue;
        auto fit = leading_order_coefficients(e);
        for (const auto& term : fit.dictionary) {
            auto it = e.continuum->expected.find(term);
            const double want = it == e.continuum->expected.end() ? 0.0 : it->second;
            EXPECT_LE(rel(fit.coefficients.at(term), want), 1e-3) << e.label << " " << term;
        }
        EXPECT_GE(fit.order, 0.9) << e.label;
    }
}

TEST(Limit, HeatPolynomialHasNoTruncationError) {
    auto e = catalog::instantiate("heat_fixed");
    LimitProbe p;
    p.function = "x^2 + 2*t";
    for (double r : scaled_residuals(e, p)) EXPECT_LE(r, 1e-9);
    // the same function is degenerate for the dictionary fit
    EXPECT_THROW(leading_order_coefficients(e, p), NumericalError);
}

TEST(Limit, RescalingTheProbeLeavesCoefficients) {
    auto e = catalog::instantiate("heat_fixed");
    auto a = leading_order_coefficients(e);
    LimitProbe p;
    p.function = std::string("7.5*(") + kDefaultProbe + ")";
    auto b = leading_order_coefficients(e, p);
    for (const auto& [term, c] : a.coefficients) EXPECT_LE(std::abs(c - b.coefficients.at(term)), 1e-8) << term;
}

TEST(Limit, InvalidScalesRejected) {
    auto e = catalog::instantiate("heat_fixed");
    LimitProbe p;
    p.scales = {0.1, 0.2, 0.05};
    EXPECT_THROW(leading_order_coefficients(e, p), std::invalid_argument);
    EXPECT_THROW(leading_order_coefficients(catalog::instantiate("heat_exponential")), std::invalid_argument);
}

TEST(ChangeOfVariables, ExponentialSolutionMapsToGalileiLimit) {
    for (double c : {1.0, 0.5, -2.0}) {
        EXPECT_LE(verify_change_of_variables(c).max_relative_residual, 1e-8) << c;
    }
    EXPECT_EQ(verify_change_of_variables(1.0).points, 100);
}

TEST(ChangeOfVariables, NonSolutionIsRejected) {
    EXPECT_GT(verify_change_of_variables(1.0, BetaScaling::Corrected, 2.0).max_relative_residual, 1e-2);
}

TEST(ChangeOfVariables, PrintedScalingMissesByPredictedAmount) {
    // with beta = (1+c^2)(t - c x) the residual is -c^2 (1+c^2) u, so relative to u_t it is a fixed ratio
    const double c = 1.0;
    auto r = verify_change_of_variables(c, BetaScaling::Printed);
    EXPECT_GT(r.max_relative_residual, 1e-2);
}
