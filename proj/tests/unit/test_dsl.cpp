#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "latsym/dsl/expression.hpp"

using namespace latsym::dsl;

namespace {

GridRef U(int i, int j) { return {Var::U, {i, j}}; }
GridRef X(int i, int j) { return {Var::X, {i, j}}; }

}  // namespace

TEST(Parse, HeatResidualReferencesAndParameters) {
    auto e = Expression::parse("(u[0,1]-u[0,0])/h2 - (u[1,0]-2*u[0,0]+u[-1,0])/h1^2");
    EXPECT_EQ(e.refs().size(), 4u);
    EXPECT_EQ(e.parameters(), (std::vector<std::string>{"h1", "h2"}));
}

TEST(Parse, SubtractionChain) {
    auto e = Expression::parse("x[1,0]-x[0,0]-h1");
    EXPECT_EQ(e.to_string(), "x[1,0] - x[0,0] - h1");
    EXPECT_EQ(e.refs().size(), 2u);
}

TEST(Parse, MalformedReferenceReportsColumn) {
    try {
        Expression::parse("u[1,");
        FAIL() << "expected a parse error";
    } catch (const ParseError& err) {
        EXPECT_EQ(err.pos().line, 1);
        EXPECT_EQ(err.pos().column, 5);
        EXPECT_FALSE(err.expected().empty());
    }
}

TEST(Parse, UnknownFunction) { EXPECT_THROW(Expression::parse("foo(x)"), ParseError); }

TEST(Parse, Precedence) {
    Environment env;
    env.params["a"] = 2.0;
    EXPECT_DOUBLE_EQ(eval(Expression::parse("-a^2"), env), -4.0);
    EXPECT_DOUBLE_EQ(eval(Expression::parse("2^3^2"), env), 512.0);
    EXPECT_DOUBLE_EQ(eval(Expression::parse("2^-1"), env), 0.5);
    EXPECT_DOUBLE_EQ(eval(Expression::parse("1-2-3"), env), -4.0);
    EXPECT_DOUBLE_EQ(eval(Expression::parse("8/2/2"), env), 2.0);
    EXPECT_DOUBLE_EQ(eval(Expression::parse("1+2*3"), env), 7.0);
}

TEST(Parse, RoundTrip) {
    const char* cases[] = {
        "(u[0,1]-u[0,0])/h2 - (u[1,0]-2*u[0,0]+u[-1,0])/h1^2",
        "-(x^2)^3 + pow(u, 2) - exp(-t/2)*sin(x)",
        "(1+c)^(t/h)",
        "a-(b-c)", "a/(b*c)", "-(-x)", "2^-x", "(-2)^2", "1e-3*x[2,-1]",
        "(u[1,1]-u[0,1]-u[1,0]+u[0,0])/((x[1,0]-x[0,0])*(y[0,1]-y[0,0])) - u[0,0]^3",
    };
    for (const char* c : cases) {
        auto e = Expression::parse(c);
        auto back = Expression::parse(e.to_string());
        EXPECT_TRUE(e == back) << c << " -> " << e.to_string();
        EXPECT_EQ(back.to_string(), e.to_string());
    }
}

TEST(Eval, LinearGradient) {
    auto e = Expression::parse("x[1,0]-2*x[0,0]+x[-1,0]");
    Environment env;
    env.refs[X(1, 0)] = 2;
    env.refs[X(0, 0)] = 1;
    env.refs[X(-1, 0)] = 0;
    auto vg = eval_with_gradient(e, env);
    EXPECT_EQ(vg.value, 0.0);
    EXPECT_EQ(vg.gradient[X(1, 0)], 1.0);
    EXPECT_EQ(vg.gradient[X(0, 0)], -2.0);
    EXPECT_EQ(vg.gradient[X(-1, 0)], 1.0);
}

TEST(Eval, HeatResidualOnShell) {
    auto e = Expression::parse("(u[0,1]-u[0,0])/h2 - (u[1,0]-2*u[0,0]+u[-1,0])/h1^2");
    Environment env;
    env.params = {{"h1", 1.0}, {"h2", 1.0}};
    env.refs = {{U(0, 0), 0.0}, {U(1, 0), 1.0}, {U(-1, 0), 1.0}, {U(0, 1), 2.0}};
    EXPECT_EQ(eval(e, env), 0.0);
}

TEST(Eval, ExpAtZero) {
    Environment env;
    env.refs[U(0, 0)] = 0.0;
    auto vg = eval_with_gradient(Expression::parse("exp(u[0,0])"), env);
    EXPECT_EQ(vg.value, 1.0);
    EXPECT_EQ(vg.gradient[U(0, 0)], 1.0);
}

TEST(Eval, DomainErrorsCarryPositions) {
    Environment env;
    env.refs[U(0, 0)] = 0.0;
    try {
        eval(Expression::parse("1 + 1/u"), env);
        FAIL();
    } catch (const EvalError& e) {
        EXPECT_EQ(e.pos().column, 6);
    }
    EXPECT_THROW(eval(Expression::parse("ln(u)"), env), EvalError);
    EXPECT_THROW(eval(Expression::parse("u^-1"), env), EvalError);
    EXPECT_THROW(eval(Expression::parse("sqrt(u-1)"), env), EvalError);
}

TEST(Eval, UnboundReference) {
    Environment env;
    EXPECT_THROW(eval(Expression::parse("u[1,0]"), env), std::invalid_argument);
}

TEST(Eval, GradientMatchesFiniteDifferences) {
    const char* cases[] = {
        "exp(u[0,0])*sin(x[1,0]) + u[0,1]^3/(1+x[1,0]^2)",
        "ln(1+u[0,0]^2) - sqrt(2+cos(x[0,0]*u[1,0]))",
        "pow(2+u[0,0]^2, x[1,0]) + abs(u[1,0]-0.1)*t[0,1]",
        "(u[1,1]-u[0,1]-u[1,0]+u[0,0])/((x[1,0]-x[0,0])*(t[0,1]-t[0,0]))",
    };
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.5, 1.5);
    for (const char* c : cases) {
        auto e = Expression::parse(c);
        for (int trial = 0; trial < 20; ++trial) {
            Environment env;
            for (const auto& r : e.refs()) env.refs[r] = dist(rng);
            if (env.refs.count(X(1, 0)) && env.refs.count(X(0, 0))) env.refs[X(1, 0)] = env.refs[X(0, 0)] + 2.0;
            if (env.refs.count({Var::T, {0, 1}}) && env.refs.count({Var::T, {0, 0}}))
                env.refs[{Var::T, {0, 1}}] = env.refs[{Var::T, {0, 0}}] + 2.0;
            auto vg = eval_with_gradient(e, env);
            for (const auto& r : e.refs()) {
                const double h = 1e-6 * std::max(1.0, std::abs(vg.value));
                Environment p = env, m = env;
                p.refs[r] += h;
                m.refs[r] -= h;
                double fd = (eval(e, p) - eval(e, m)) / (2 * h);
                EXPECT_NEAR(vg.gradient[r], fd, 1e-5 * std::max(1.0, std::abs(fd))) << c << " wrt " << to_string(r);
            }
        }
    }
}

TEST(Eval, Deterministic) {
    auto e = Expression::parse("exp(u)*sin(x) + t^2/3");
    Environment env;
    env.refs = {{U(0, 0), 0.3}, {X(0, 0), 1.7}, {{Var::T, {0, 0}}, -2.1}};
    double a = eval(e, env);
    double b = eval(e, env);
    EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
}

TEST(Expression, BindParameters) {
    auto e = Expression::parse("u[0,0]*c - c^2").bind({{"c", -2.0}});
    EXPECT_TRUE(e.parameters().empty());
    Environment env;
    env.refs[U(0, 0)] = 1.0;
    EXPECT_DOUBLE_EQ(eval(e, env), -6.0);
    EXPECT_TRUE(Expression::parse(e.to_string()) == e);
}
