#include "latsym/catalog/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace latsym::catalog {

using lattice::GridRef;
using lattice::SeedRecipe;
using lattice::StencilBounds;
using lattice::StencilConfiguration;
using lattice::Var;
using dsl::Expression;

UnknownScheme::UnknownScheme(const std::string& id)
    : std::invalid_argument([&] {
          std::string msg = "unknown scheme '" + id + "'; known ids:";
          for (const auto& k : scheme_ids()) msg += " " + k;
          return msg;
      }()) {}

std::vector<FieldSpec> CatalogEntry::oracle() const {
    auto all = finite_oracle;
    all.insert(all.end(), superposition_oracle.begin(), superposition_oracle.end());
    return all;
}

int CatalogEntry::expected_dimension() const {
    if (expected_finite < 0 || expected_superposition < 0) return -1;
    return expected_finite + expected_superposition;
}

const std::vector<std::string>& scheme_ids() {
    static const std::vector<std::string> ids = {"heat_fixed",   "heat_dilation5",    "heat_dilation4",
                                                 "heat_exponential", "heat_galilei", "lorentz",
                                                 "burgers_potential", "burgers_linearizable"};
    return ids;
}

namespace {

Expression P(const std::string& s) { return Expression::parse(s); }

std::array<GridRef, 5> evolution_unknowns() {
    return {GridRef{Var::X, {1, 0}}, GridRef{Var::T, {1, 0}}, GridRef{Var::X, {0, 1}}, GridRef{Var::T, {0, 1}},
            GridRef{Var::U, {0, 1}}};
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Merge user overrides into the declared specs, validating ranges.
std::map<std::string, double> resolve(const std::string& id, std::vector<ParamSpec>& specs,
                                      const std::map<std::string, std::string>& given,
                                      const std::set<std::string>& structural) {
    for (const auto& [k, text] : given) {
        if (structural.contains(k)) continue;
        auto it = std::find_if(specs.begin(), specs.end(), [&](const ParamSpec& p) { return p.name == k; });
        if (it == specs.end()) throw InvalidParameter("scheme '" + id + "' has no parameter '" + k + "'");
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size()) {
            throw InvalidParameter("parameter '" + k + "' of '" + id + "' expects a number, got '" + text + "'");
        }
        it->value = v;
    }
    std::map<std::string, double> out;
    for (const auto& p : specs) {
        if (!std::isfinite(p.value) || p.value < p.lo || p.value > p.hi) {
            throw InvalidParameter("parameter " + p.name + "=" + fmt(p.value) + " of '" + id + "' outside its range " +
                                   (p.note.empty() ? "" : "(" + p.note + ")"));
        }
        for (double e : p.excluded) {
            if (std::abs(p.value - e) <= 1e-12) {
                throw InvalidParameter("parameter " + p.name + "=" + fmt(p.value) + " of '" + id + "' is excluded (" +
                                       p.note + ")");
            }
        }
        out[p.name] = p.value;
    }
    return out;
}

ParamSpec positive(const std::string& name, double v, const std::string& note = "> 0") {
    return {name, v, 1e-300, 1e300, {}, note};
}
ParamSpec any(const std::string& name, double v) { return {name, v, -1e300, 1e300, {}, ""}; }

const FieldSpec kP1{"P1", "1", "0", "0"};
const FieldSpec kP0{"P0", "0", "1", "0"};
const FieldSpec kW{"W", "0", "0", "u"};
const FieldSpec kD{"D", "x", "2*t", "0"};
const FieldSpec kS1{"S[1]", "0", "0", "1"};
const FieldSpec kSx{"S[x]", "0", "0", "x"};
const FieldSpec kSheat{"S[x^2+2t]", "0", "0", "x^2 + 2*t"};

const char* kHeatVariable =
    "(u[0,1]-u[0,0])/(t[0,1]-t[0,0]) - (u[1,0]-2*u[0,0]+u[-1,0])/(x[1,0]-x[0,0])^2";

std::vector<std::string> heat_dictionary() { return {"u_t", "u_x", "u_xx", "u_xt", "u", "1"}; }

CatalogEntry heat_fixed(const std::map<std::string, std::string>& given) {
    CatalogEntry e;
    e.id = e.label = "heat_fixed";
    e.params = {positive("h1", 1.0), positive("h2", 0.25), any("x0", 0.0), any("t0", 0.0)};
    auto v = resolve(e.id, e.params, given, {});
    StencilBounds b{1, 1, 0, 1};
    SeedRecipe seed{1, 0, P("h1*m + x0"), P("h2*n + t0"), P("sin(0.5*x) + 0.1*x")};
    e.scheme = Scheme(e.id, b,
                      {P("x[1,0]-x[0,0]-h1"), P("t[1,0]-t[0,0]"), P("x[0,1]-x[0,0]"), P("t[0,1]-t[0,0]-h2"),
                       P("(u[0,1]-u[0,0])/h2 - (u[1,0]-2*u[0,0]+u[-1,0])/h1^2")},
                      v, evolution_unknowns(), false, seed);
    e.finite_oracle = {kP1, kP0, kW};
    e.superposition_oracle = {kS1, kSx, kSheat};
    e.excluded = {kD, {"B", "t", "0", "0"}};
    e.expected_finite = 3;
    e.expected_superposition = 3;
    ContinuumSpec cs;
    cs.scaled_params = [](double eps) { return std::map<std::string, double>{{"h1", eps}, {"h2", eps * eps}}; };
    cs.position = [](double x, double t, Offset o, double eps) {
        return std::array<double, 2>{x + o.i * eps, t + o.j * eps * eps};
    };
    cs.dictionary = heat_dictionary();
    cs.expected = {{"u_t", 1.0}, {"u_xx", -1.0}};
    e.continuum = cs;
    return e;
}

CatalogEntry heat_dilation5(const std::map<std::string, std::string>& given) {
    CatalogEntry e;
    e.id = e.label = "heat_dilation5";
    e.params = {positive("h1", 1.0), positive("h2", 0.25), any("x0", 0.0), any("t0", 0.0)};
    auto v = resolve(e.id, e.params, given, {});
    StencilBounds b{1, 1, 1, 1};
    SeedRecipe seed{2, 0, P("h1*m + x0"), P("h2*n + t0"), P("sin(0.5*x) + 0.1*x")};
    e.scheme = Scheme(e.id, b,
                      {P("x[1,0]-2*x[0,0]+x[-1,0]"), P("x[0,1]-x[0,0]"), P("t[1,0]-t[0,0]"),
                       P("t[0,1]-2*t[0,0]+t[0,-1]"), P(kHeatVariable)},
                      v, evolution_unknowns(), false, seed);
    e.finite_oracle = {kP1, kP0, kW, kD};
    e.superposition_oracle = {kS1, kSx, kSheat};
    e.excluded = {{"B", "t", "0", "0"}};
    e.expected_finite = 4;
    e.expected_superposition = 3;
    e.sampling.admissible = [](const StencilConfiguration& c) {
        return std::abs(c.get({Var::T, {0, 1}}) - c.get({Var::T, {0, 0}})) >= 0.05;
    };
    ContinuumSpec cs;
    cs.scaled_params = [](double) { return std::map<std::string, double>{}; };
    cs.position = [](double x, double t, Offset o, double eps) {
        return std::array<double, 2>{x + o.i * eps, t + o.j * eps * eps};
    };
    cs.dictionary = heat_dictionary();
    cs.expected = {{"u_t", 1.0}, {"u_xx", -1.0}};
    e.continuum = cs;
    return e;
}

CatalogEntry heat_dilation4(const std::map<std::string, std::string>& given) {
    CatalogEntry e;
    e.id = e.label = "heat_dilation4";
    e.params = {{"c", 0.25, -1e300, 1e300, {0.0}, "c != 0"}, positive("h1", 1.0), any("x0", 0.0), any("t0", 0.0)};
    auto v = resolve(e.id, e.params, given, {});
    StencilBounds b{1, 1, 0, 1};
    SeedRecipe seed{1, 0, P("h1*m + x0"), P("c*h1^2*n + t0"), P("sin(0.5*x) + 0.1*x")};
    e.scheme = Scheme(e.id, b,
                      {P("x[1,0]-2*x[0,0]+x[-1,0]"), P("x[0,1]-x[0,0]"), P("t[1,0]-t[0,0]"),
                       P("t[0,1]-t[0,0]-c*(x[1,0]-x[0,0])^2"), P("u[0,1]-u[0,0]-c*(u[1,0]-2*u[0,0]+u[-1,0])")},
                      v, evolution_unknowns(), false, seed);
    e.finite_oracle = {kP1, kP0, kW, kD};
    e.superposition_oracle = {kS1, kSx, kSheat};
    e.excluded = {{"B", "t", "0", "0"}};
    e.expected_finite = 4;
    e.expected_superposition = 3;
    const double c = v["c"];
    ContinuumSpec cs;
    cs.scaled_params = [](double) { return std::map<std::string, double>{}; };
    cs.position = [c](double x, double t, Offset o, double eps) {
        return std::array<double, 2>{x + o.i * eps, t + o.j * c * eps * eps};
    };
    cs.dictionary = heat_dictionary();
    cs.expected = {{"u_t", 1.0}, {"u_xx", -1.0}};
    e.continuum = cs;
    return e;
}

CatalogEntry heat_exponential(const std::map<std::string, std::string>& given) {
    CatalogEntry e;
    e.id = e.label = "heat_exponential";
    e.params = {{"c", 0.2, -1e300, 1e300, {0.0, -1.0}, "c != 0, -1"},
                positive("h", 0.25),
                {"alpha", 1.0, -1e300, 1e300, {0.0}, "alpha != 0"},
                any("beta", 0.0),
                any("t0", 0.0)};
    auto v = resolve(e.id, e.params, given, {});
    StencilBounds b{1, 1, 0, 1};
    SeedRecipe seed{1, 0, P("(1+c)^n*(alpha*m + beta)"), P("h*n + t0"), P("sin(0.5*x) + 0.1*x")};
    e.scheme = Scheme(e.id, b,
                      {P("x[1,0]-2*x[0,0]+x[-1,0]"), P("x[0,1]-(1+c)*x[0,0]"), P("t[0,1]-t[0,0]-h"),
                       P("t[1,0]-t[0,0]"), P("(u[0,1]-u[0,0])/h - (u[1,0]-2*u[0,0]+u[-1,0])/(x[1,0]-x[0,0])^2")},
                      v, evolution_unknowns(), false, seed);
    e.finite_oracle = {{"P1", "(1+c)^(t/h)", "0", "0"}, kP0, kW};
    e.superposition_oracle = {kS1};
    e.excluded = {{"X", "x", "0", "0"}, kP1};
    e.extra_basis = {"(1+c)^(t/h)"};
    e.expected_finite = 3;
    e.expected_superposition = 1;
    if (1.0 + v["c"] < 0.0) {
        throw InvalidParameter("heat_exponential requires 1 + c > 0 for the registered function (1+c)^(t/h)");
    }
    return e;
}

CatalogEntry heat_galilei(const std::map<std::string, std::string>& given) {
    CatalogEntry e;
    e.id = e.label = "heat_galilei";
    e.params = {positive("tau1", 1.0), positive("tau2", 0.5), positive("zeta", 1.0),
                {"sigma", 1.0, -1e300, 1e300, {0.0}, "sigma != 0"}, any("x0", 0.0), any("t0", 0.0)};
    auto v = resolve(e.id, e.params, given, {});
    StencilBounds b{1, 1, 0, 1};
    SeedRecipe seed{1, 0, P("sigma*tau1*m + (sigma*tau1*tau2 - zeta)/tau1*n + x0"), P("tau1*m + tau2*n + t0"),
                    P("sin(0.5*x) + 0.1*x")};
    e.scheme = Scheme(e.id, b,
                      {P("t[1,0]-t[0,0]-tau1"), P("t[0,1]-t[0,0]-tau2"), P("x[1,0]-2*x[0,0]+x[-1,0]"),
                       P("(x[1,0]-x[0,0])*tau2 - (x[0,1]-x[0,0])*tau1 - zeta"),
                       P("(u[0,1]-u[0,0])/tau2 - tau2^2*(u[1,0]-2*u[0,0]+u[-1,0])/zeta^2")},
                      v, evolution_unknowns(), false, seed);
    e.finite_oracle = {kP0, kP1, {"B", "t", "0", "0"}, kW};
    e.superposition_oracle = {kS1};
    e.excluded = {kD};
    e.expected_finite = 4;
    e.expected_superposition = -1;
    const double sigma = v["sigma"];
    ContinuumSpec cs;
    cs.scaled_params = [sigma](double eps) {
        return std::map<std::string, double>{{"tau1", eps}, {"tau2", eps}, {"zeta", sigma * eps * eps}};
    };
    cs.position = [sigma](double x, double t, Offset o, double eps) {
        return std::array<double, 2>{x + sigma * eps * o.i, t + eps * (o.i + o.j)};
    };
    cs.dictionary = {"u_t", "u_x", "u_xx", "u_xt", "u_tt", "u", "1"};
    cs.expected = {{"u_t", 1.0}, {"u_xx", -1.0}, {"u_xt", -2.0 / sigma}, {"u_tt", -1.0 / (sigma * sigma)}};
    cs.probe = "sin(1.3*x)*exp(-0.6*t) + 0.3*x*t + 0.2*t^3 + 0.5*cos(0.7*x + 1.1*t)";
    e.continuum = cs;
    return e;
}

CatalogEntry lorentz(const std::map<std::string, std::string>& given) {
    CatalogEntry e;
    e.id = "lorentz";
    std::string f = "power";
    if (auto it = given.find("f"); it != given.end()) f = it->second;
    if (f != "power" && f != "exp" && f != "linear" && f != "constant") {
        throw InvalidParameter("lorentz interaction f must be one of power, exp, linear, constant (got '" + f + "')");
    }
    e.interaction = f;
    e.params = {positive("hx", 0.1), positive("hy", 0.1), any("x0", 0.0), any("y0", 0.0)};
    if (f == "power") e.params.insert(e.params.begin(), ParamSpec{"p", 3.0, -1e300, 1e300, {0.0, 1.0}, "p != 0, 1"});
    if (f != "power" && given.contains("p")) throw InvalidParameter("parameter p only applies to f=power");
    auto v = resolve(e.id, e.params, given, {"f"});
    e.label = "lorentz[f=" + f + (f == "power" ? ",p=" + fmt(v["p"]) : "") + "]";

    std::string rhs = f == "power" ? "u[0,0]^p" : f == "exp" ? "exp(u[0,0])" : f == "linear" ? "u[0,0]" : "1";
    const bool integer_p = f == "power" && v["p"] == std::round(v["p"]);
    std::string profile = f == "exp" ? "-1 + 0.2*sin(x) + 0.1*cos(2*y)" : "0.5 + 0.2*sin(x) + 0.1*cos(2*y)";
    StencilBounds b{1, 1, 1, 1};
    SeedRecipe seed{2, 2, P("hx*m + x0"), P("hy*n + y0"), P(profile)};
    std::array<GridRef, 5> unknowns{GridRef{Var::X, {1, 0}}, GridRef{Var::T, {1, 0}}, GridRef{Var::X, {0, 1}},
                                    GridRef{Var::T, {0, 1}}, GridRef{Var::U, {1, 1}}};
    e.scheme = Scheme(e.id, b,
                      {P("x[1,0]-2*x[0,0]+x[-1,0]"), P("x[0,1]-x[0,0]"), P("y[0,1]-2*y[0,0]+y[0,-1]"),
                       P("y[1,0]-y[0,0]"),
                       P("(u[1,1]-u[0,1]-u[1,0]+u[0,0])/((x[1,0]-x[0,0])*(y[0,1]-y[0,0])) - " + rhs)},
                      v, unknowns, true, seed);
    e.finite_oracle = {{"X1", "1", "0", "0"}, {"X2", "0", "1", "0"}, {"L", "x", "-y", "0"}};
    std::vector<std::string> dict = {"u_xt", "u_x", "u_t", "u", "1"};
    std::map<std::string, double> expected = {{"u_xt", 1.0}};
    if (f == "power") {
        e.finite_oracle.push_back({"D", "x", "y", "2/(1-p)*u"});
        e.superposition_oracle = {};
        e.expected_superposition = 0;
        dict.push_back("u^p");
        expected["u^p"] = -1.0;
        if (!integer_p) e.sampling.ranges[2] = {0.2, 2.0};
    } else if (f == "exp") {
        e.finite_oracle.push_back({"D", "x", "y", "-2"});
        e.expected_superposition = 0;
        dict.push_back("exp(u)");
        expected["exp(u)"] = -1.0;
    } else if (f == "linear") {
        e.finite_oracle.push_back({"D", "0", "0", "u"});
        e.expected_superposition = 0;
        expected["u"] = -1.0;
    } else {
        e.finite_oracle.push_back({"L2", "x", "y", "2*u"});
        e.superposition_oracle = {kS1, {"S[x]", "0", "0", "x"}, {"S[x^2]", "0", "0", "x^2"},
                                  {"S[y]", "0", "0", "y"}, {"S[y^2]", "0", "0", "y^2"}};
        e.expected_superposition = 5;
        expected["1"] = -1.0;
    }
    e.excluded = {{"R", "y", "-x", "0"}};
    e.expected_finite = 4;
    ContinuumSpec cs;
    cs.scaled_params = [](double) { return std::map<std::string, double>{}; };
    cs.position = [](double x, double y, Offset o, double eps) {
        return std::array<double, 2>{x + o.i * eps, y + o.j * eps};
    };
    cs.dictionary = dict;
    cs.expected = expected;
    if (f == "power" && !integer_p) cs.probe = "1.5 + sin(x)*exp(-t/2) + 0.3*x*t";
    e.continuum = cs;
    return e;
}

CatalogEntry burgers_potential(const std::map<std::string, std::string>& given) {
    CatalogEntry e;
    e.id = e.label = "burgers_potential";
    e.params = {{"c", 0.25, 1e-300, 1e300, {}, "c > 0"}, positive("h1", 1.0), any("x0", 0.0), any("t0", 0.0)};
    auto v = resolve(e.id, e.params, given, {});
    StencilBounds b{1, 1, 0, 1};
    SeedRecipe seed{1, 0, P("h1*m + x0"), P("c*h1^2*n + t0"), P("0.3*sin(0.5*x)")};
    e.scheme = Scheme(e.id, b,
                      {P("x[1,0]-2*x[0,0]+x[-1,0]"), P("x[0,1]-x[0,0]"), P("t[1,0]-t[0,0]"),
                       P("t[0,1]-t[0,0]-c*(x[1,0]-x[0,0])^2"),
                       P("(u[0,1]-u[0,0])/(t[0,1]-t[0,0]) - (u[1,0]-2*u[0,0]+u[-1,0])/(x[1,0]-x[0,0])^2"
                         " - ((u[1,0]-u[0,0])/(x[1,0]-x[0,0]))^2")},
                      v, evolution_unknowns(), false, seed);
    e.finite_oracle = {kP1, kP0, kD};
    e.superposition_oracle = {{"W", "0", "0", "1"}};
    e.excluded = {kW};
    e.expected_finite = 3;
    e.expected_superposition = 1;
    const double c = v["c"];
    ContinuumSpec cs;
    cs.scaled_params = [](double) { return std::map<std::string, double>{}; };
    cs.position = [c](double x, double t, Offset o, double eps) {
        return std::array<double, 2>{x + o.i * eps, t + o.j * c * eps * eps};
    };
    cs.dictionary = {"u_t", "u_x", "u_xx", "u_x^2", "u", "1"};
    cs.expected = {{"u_t", 1.0}, {"u_xx", -1.0}, {"u_x^2", -1.0}};
    e.continuum = cs;
    return e;
}

CatalogEntry burgers_linearizable(const std::map<std::string, std::string>& given) {
    CatalogEntry e;
    e.id = e.label = "burgers_linearizable";
    e.params = {{"c", 0.25, 1e-300, 1e300, {}, "c > 0"}, positive("h1", 1.0), any("x0", 0.0), any("t0", 0.0)};
    auto v = resolve(e.id, e.params, given, {});
    StencilBounds b{1, 2, 0, 1};
    SeedRecipe seed{1, 0, P("h1*m + x0"), P("c*h1^2*n + t0"), P("0.2*sin(0.5*x)")};
    const std::string h = "(x[1,0]-x[0,0])";
    const std::string N = "(1+" + h + "*u[0,0])*(u[2,0]-2*u[1,0]+u[0,0]+" + h + "*u[1,0]*(u[2,0]-u[0,0]))";
    const std::string D = "(1+c*" + h + "*(u[1,0]-u[0,0]+" + h + "*u[0,0]*u[1,0]))";
    e.scheme = Scheme(e.id, b,
                      {P("x[1,0]-2*x[0,0]+x[-1,0]"), P("x[0,1]-x[0,0]"), P("t[1,0]-t[0,0]"),
                       P("t[0,1]-t[0,0]-c*" + h + "^2"), P("u[0,1]-u[0,0]-c*" + N + "/" + D)},
                      v, evolution_unknowns(), false, seed);
    e.finite_oracle = {kP0, kP1, {"D", "x", "2*t", "-u"}};
    e.expected_finite = 3;
    e.expected_superposition = 0;
    e.excluded = {kW, kS1};
    const double c = v["c"];
    e.sampling.admissible = [c](const StencilConfiguration& cfg) {
        const double hx = cfg.get({Var::X, {1, 0}}) - cfg.get({Var::X, {0, 0}});
        const double u0 = cfg.get({Var::U, {0, 0}});
        const double u1 = cfg.get({Var::U, {1, 0}});
        return std::abs(1.0 + c * hx * (u1 - u0 + hx * u0 * u1)) >= 0.1;
    };
    ContinuumSpec cs;
    cs.scaled_params = [](double) { return std::map<std::string, double>{}; };
    cs.position = [c](double x, double t, Offset o, double eps) {
        return std::array<double, 2>{x + o.i * eps, t + o.j * c * eps * eps};
    };
    cs.dictionary = {"u_t", "u_x", "u_xx", "u*u_x", "u", "1"};
    cs.expected = {{"u_t", 1.0}, {"u_xx", -1.0}, {"u*u_x", -2.0}};
    e.continuum = cs;
    return e;
}

using Builder = CatalogEntry (*)(const std::map<std::string, std::string>&);

const std::map<std::string, Builder>& builders() {
    static const std::map<std::string, Builder> b = {
        {"heat_fixed", heat_fixed},
        {"heat_dilation5", heat_dilation5},
        {"heat_dilation4", heat_dilation4},
        {"heat_exponential", heat_exponential},
        {"heat_galilei", heat_galilei},
        {"lorentz", lorentz},
        {"burgers_potential", burgers_potential},
        {"burgers_linearizable", burgers_linearizable},
    };
    return b;
}

}  // namespace

CatalogEntry instantiate(const std::string& id, const std::map<std::string, std::string>& params) {
    auto it = builders().find(id);
    if (it == builders().end()) throw UnknownScheme(id);
    return it->second(params);
}

CatalogEntry instantiate(const std::string& id, const std::map<std::string, double>& params) {
    std::map<std::string, std::string> text;
    for (const auto& [k, v] : params) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        text[k] = buf;
    }
    return instantiate(id, text);
}

std::vector<CatalogEntry> reference_runs() {
    std::vector<CatalogEntry> out;
    for (const char* id : {"heat_fixed", "heat_dilation5", "heat_dilation4", "heat_exponential", "heat_galilei"}) {
        out.push_back(instantiate(id));
    }
    for (const char* f : {"power", "exp", "linear", "constant"}) {
        out.push_back(instantiate("lorentz", std::map<std::string, std::string>{{"f", f}}));
    }
    out.push_back(instantiate("burgers_potential"));
    out.push_back(instantiate("burgers_linearizable"));
    return out;
}

std::string list_text() {
    std::ostringstream os;
    for (const auto& id : scheme_ids()) {
        auto e = instantiate(id);
        os << id;
        if (id == "lorentz") os << " f=power|exp|linear|constant";
        for (const auto& p : e.params) {
            os << " " << p.name << "=" << fmt(p.value);
            if (!p.note.empty() && p.note != "> 0") os << " (" << p.note << ")";
            if (p.note == "> 0") os << " (>0)";
        }
        os << "\n";
    }
    return os.str();
}

namespace {
double param(const CatalogEntry& e, const std::string& k) {
    auto it = e.scheme.params().find(k);
    if (it == e.scheme.params().end()) throw InvalidParameter("entry '" + e.id + "' has no parameter " + k);
    return it->second;
}
}  // namespace

bool galilei_orthogonal(const CatalogEntry& e, double sigma, double tol) {
    const double t1 = param(e, "tau1"), t2 = param(e, "tau2"), z = param(e, "zeta");
    const double lhs = (sigma * sigma + 1.0) * t1 * t2;
    const double rhs = sigma * z;
    return std::abs(lhs - rhs) <= tol * (1.0 + std::abs(lhs) + std::abs(rhs));
}

bool galilei_aligned(const CatalogEntry& e, double sigma, double tol) {
    const double t1 = param(e, "tau1"), t2 = param(e, "tau2"), z = param(e, "zeta");
    return std::abs(sigma * t1 * t2 - z) <= tol * (1.0 + std::abs(z));
}

}  // namespace latsym::catalog
