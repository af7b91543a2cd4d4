// One line per acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "latsym/catalog/catalog.hpp"
#include "latsym/cli/cli.hpp"
#include "latsym/continuum/continuum.hpp"
#include "latsym/errors.hpp"
#include "latsym/finder/catalog_runs.hpp"
#include "latsym/finder/finder.hpp"
#include "latsym/flow/flow.hpp"
#include "latsym/symmetry/bracket.hpp"
#include "latsym/symmetry/prolong.hpp"
#include "oracles.hpp"

using namespace latsym;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;
    void fail(const std::string& why) {
        pass = false;
        notes.push_back(why);
    }
    void note(const std::string& what) { notes.push_back(what); }
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

// Found-symmetry runs are shared by criteria 2, 3 and 5.
struct FoundRun {
    catalog::CatalogEntry entry;
    finder::SymmetryBasis basis;
    std::string error;
};

const std::vector<FoundRun>& found_runs() {
    static const std::vector<FoundRun> runs = [] {
        std::vector<FoundRun> out;
        for (const auto& e : catalog::reference_runs()) {
            FoundRun r{e, {}, {}};
            try {
                r.basis = finder::find_symmetries(e.scheme, finder::ansatz_for(e), finder::options_for(e));
            } catch (const std::exception& ex) {
                r.error = ex.what();
            }
            out.push_back(std::move(r));
        }
        return out;
    }();
    return runs;
}

symmetry::VectorField oracle_field(const catalog::FieldSpec& f, const FoundRun& r) {
    return symmetry::VectorField::from_components(f.xi, f.tau, f.phi, r.basis.basis, r.entry.scheme.params());
}

bool contains(const std::vector<symmetry::VectorField>& span, const symmetry::VectorField& v, double tol = 1e-6) {
    return !span.empty() && finder::project(v, span).second <= tol;
}

Outcome catalog_self_test() {
    Outcome o;
    double worst = 0.0;
    for (const auto& e : catalog::reference_runs()) {
        auto sampling = e.sampling;
        sampling.seed = 2024;
        lattice::OnShellSampler sampler(e.scheme, sampling);
        const auto configs = sampler.draw(50);
        for (const auto& f : e.oracle()) {
            symmetry::ExpressionField v(f.xi, f.tau, f.phi, e.scheme.params());
            double m = 0.0;
            for (const auto& c : configs) {
                for (double r : symmetry::prolonged_action(v, e.scheme, c)) m = std::max(m, std::abs(r));
            }
            worst = std::max(worst, m);
            if (m > 1e-8) o.fail(e.label + " " + f.name + " " + sci(m));
        }
    }
    o.note("max |pr X E| " + sci(worst));
    return o;
}

Outcome finder_dimensions() {
    Outcome o;
    for (const auto& r : found_runs()) {
        const auto& e = r.entry;
        if (!r.error.empty()) {
            o.fail(e.label + ": " + r.error);
            continue;
        }
        const auto finite = r.basis.in_sector(finder::Sector::Finite);
        const int nf = r.basis.dimension(finder::Sector::Finite);
        const int ns = r.basis.dimension(finder::Sector::Superposition);
        const int total = static_cast<int>(r.basis.size());
        auto expect_total = [&](int want) {
            if (total != want) o.fail(e.label + " total " + std::to_string(total) + " != " + std::to_string(want));
        };
        auto expect_finite_span = [&](const std::vector<catalog::FieldSpec>& fields, int dim) {
            if (nf != dim) o.fail(e.label + " finite " + std::to_string(nf) + " != " + std::to_string(dim));
            for (const auto& f : fields) {
                if (!contains(finite, oracle_field(f, r))) o.fail(e.label + " finite sector misses " + f.name);
            }
        };
        if (e.id == "heat_fixed") expect_total(6);
        if (e.id == "heat_dilation5" || e.id == "heat_dilation4") expect_total(7);
        if (e.id == "heat_exponential") {
            for (const auto& f : e.finite_oracle) {
                if (!contains(finite, oracle_field(f, r))) o.fail(e.label + " finite sector misses " + f.name);
            }
            auto xdx = symmetry::VectorField::from_text("xi = x", r.basis.basis, e.scheme.params());
            if (contains(r.basis.fields, xdx, 1e-3)) o.fail(e.label + " admits x d/dx");
        }
        if (e.id == "heat_galilei") expect_finite_span(e.finite_oracle, 4);
        if (e.id == "lorentz" && (e.interaction == "power" || e.interaction == "exp")) expect_total(4);
        if (e.id == "lorentz" && e.interaction == "linear") expect_finite_span(e.finite_oracle, 4);
        if (e.id == "lorentz" && e.interaction == "constant") {
            if (nf != 4 || ns != 5) {
                std::vector<symmetry::VectorField> expected;
                for (const auto& f : e.finite_oracle) expected.push_back(oracle_field(f, r));
                for (const auto& f : e.superposition_oracle) expected.push_back(oracle_field(f, r));
                std::string extra;
                for (const auto& v : finite) {
                    const auto [coef, resid] = finder::project(v, expected);
                    if (resid <= 1e-6) continue;
                    auto outside = v;
                    for (std::size_t q = 0; q < expected.size(); ++q) outside = outside - expected[q] * coef(static_cast<Eigen::Index>(q));
                    extra += " [" + outside.to_text(1e-8) + "]";
                }
                o.fail(e.label + " finite " + std::to_string(nf) + " + superposition " + std::to_string(ns) +
                       " != 4 + 5; part of the finite sector outside the expected span:" + extra);
            }
        }
        if (e.id == "burgers_potential") expect_total(4);
        if (e.id == "burgers_linearizable") expect_total(3);
        // polynomial slice of the superposition sector against a brute-force solve
        if (e.expected_superposition > 0) {
            const int brute = oracle::polynomial_superposition_count(e, 2, 2);
            if (brute != ns) {
                o.fail(e.label + " superposition " + std::to_string(ns) + " != brute-force " + std::to_string(brute));
            }
        }
        o.note(e.label + "=" + std::to_string(nf) + "+" + std::to_string(ns));
    }
    return o;
}

Outcome soundness() {
    Outcome o;
    double worst = 0.0;
    for (const auto& r : found_runs()) {
        if (!r.error.empty()) {
            o.fail(r.entry.label + ": " + r.error);
            continue;
        }
        auto sampling = r.entry.sampling;
        sampling.seed = 777001;
        const auto res = finder::verify_fields(r.entry.scheme, r.basis.fields, sampling, 100);
        for (std::size_t k = 0; k < res.size(); ++k) {
            worst = std::max(worst, res[k]);
            if (res[k] > 1e-7) o.fail(r.entry.label + " " + r.basis.names[k] + " " + sci(res[k]));
        }
    }
    o.note("max held-out " + sci(worst));
    return o;
}

Outcome flow_invariance() {
    Outcome o;
    double worst = 0.0;
    for (const auto& e : catalog::reference_runs()) {
        const auto g = lattice::propagate_grid(e.scheme, lattice::make_seed(e.scheme, e.window), e.window);
        if (g.window().width() != 20 || g.window().height() != 20) o.fail(e.label + " grid is not 20x20");
        const auto basis = finder::ansatz_for(e);
        for (const auto& f : e.oracle()) {
            auto v = symmetry::VectorField::from_components(f.xi, f.tau, f.phi, basis, e.scheme.params());
            for (double lambda : {-0.5, -0.1, 0.1, 0.5}) {
                flow::FlowOptions fo;
                fo.lambda = lambda;
                fo.richardson = false;
                try {
                    const auto t = flow::transform_and_verify(v, g, e.scheme, fo);
                    worst = std::max(worst, t.max_residual);
                    if (t.max_residual > 1e-7) o.fail(e.label + " " + f.name + " lambda " + sci(lambda) + " " + sci(t.max_residual));
                } catch (const NumericalError& ex) {
                    o.fail(e.label + " " + f.name + ": " + ex.what());
                }
            }
        }
    }
    o.note("max residual " + sci(worst));
    auto e = catalog::instantiate("heat_fixed");
    const double h2 = e.scheme.params().at("h2");
    const auto g = lattice::propagate_grid(e.scheme, lattice::make_seed(e.scheme, e.window), e.window);
    symmetry::ExpressionField boost("t", "0", "0");
    double dev = 0.0;
    for (double lambda : {-0.5, -0.1, 0.1, 0.5}) {
        flow::FlowOptions fo;
        fo.lambda = lambda;
        const auto t = flow::transform_and_verify(boost.function(), g, e.scheme, fo);
        dev = std::max(dev, std::abs(t.max_residuals[2] - std::abs(lambda) * h2));
    }
    if (dev > 1e-9) o.fail("boost on fixed lattice: E3 deviates from lambda*h2 by " + sci(dev));
    o.note("boost control deviation " + sci(dev));
    return o;
}

Outcome lie_algebra() {
    Outcome o;
    double jacobi = 0.0, closure = 0.0;
    bool antisymmetric = true;
    for (const auto& r : found_runs()) {
        if (!r.error.empty()) {
            o.fail(r.entry.label + ": " + r.error);
            continue;
        }
        const auto f = r.basis.in_sector(finder::Sector::Finite);
        try {
            for (std::size_t i = 0; i < f.size(); ++i) {
                for (std::size_t j = 0; j < f.size(); ++j) {
                    auto ab = symmetry::lie_bracket(f[i], f[j]).stacked();
                    auto ba = symmetry::lie_bracket(f[j], f[i]).stacked();
                    if (ab != -ba) antisymmetric = false;
                    for (std::size_t k = 0; k < f.size(); ++k) {
                        using symmetry::lie_bracket;
                        auto jac = lie_bracket(f[i], lie_bracket(f[j], f[k])) + lie_bracket(f[j], lie_bracket(f[k], f[i])) +
                                   lie_bracket(f[k], lie_bracket(f[i], f[j]));
                        jacobi = std::max(jacobi, jac.stacked().cwiseAbs().maxCoeff());
                    }
                }
            }
        } catch (const SpanEscape& ex) {
            o.fail(r.entry.label + " bracket escapes: " + ex.what());
            continue;
        }
        const auto sc = finder::structure_constants(f);
        closure = std::max(closure, sc.closure_residual);
        if (!sc.closed(1e-8)) o.fail(r.entry.label + " finite sector not closed, residual " + sci(sc.closure_residual));
        if (r.entry.id == "heat_galilei") {
            auto index = [&](const std::string& name) {
                int at = -1, k = 0;
                for (std::size_t q = 0; q < r.basis.size(); ++q) {
                    if (r.basis.sectors[q] != finder::Sector::Finite) continue;
                    if (r.basis.names[q] == name) at = k;
                    ++k;
                }
                return at;
            };
            const int p0 = index("P0"), b = index("B"), p1 = index("P1");
            if (p0 < 0 || b < 0 || p1 < 0) {
                o.fail("heat_galilei: P0, B or P1 not identified among found fields");
            } else {
                double dev = 0.0;
                for (std::size_t k = 0; k < f.size(); ++k) {
                    const double want = static_cast<int>(k) == p1 ? 1.0 : 0.0;
                    dev = std::max(dev, std::abs(sc.c[static_cast<std::size_t>(p0)][static_cast<std::size_t>(b)][k] - want));
                }
                if (dev > 1e-8) o.fail("[P0, B] != P1, deviation " + sci(dev));
                o.note("[P0,B]=P1 dev " + sci(dev));
            }
        }
    }
    if (!antisymmetric) o.fail("bracket not exactly antisymmetric");
    if (jacobi > 1e-10) o.fail("Jacobi " + sci(jacobi));
    o.note("Jacobi " + sci(jacobi) + ", worst closure " + sci(closure));
    return o;
}

Outcome continuum_limits() {
    Outcome o;
    auto g = catalog::instantiate("heat_galilei", std::map<std::string, double>{{"sigma", 2.0}});
    const double sigma = 2.0;
    const auto fit = continuum::leading_order_coefficients(g);
    const std::map<std::string, double> want = {
        {"u_t", 1.0}, {"u_xx", -1.0}, {"u_xt", -2.0 / sigma}, {"u_tt", -1.0 / (sigma * sigma)}};
    double dev = 0.0;
    for (const auto& [term, c] : fit.coefficients) {
        auto it = want.find(term);
        dev = std::max(dev, it == want.end() ? std::abs(c) : std::abs(c - it->second) / std::abs(it->second));
    }
    if (dev > 1e-3) o.fail("galilei limit deviation " + sci(dev));
    if (fit.order < 0.9) o.fail("galilei remainder order " + sci(fit.order));
    o.note("galilei dev " + sci(dev) + " order " + std::to_string(fit.order).substr(0, 5));

    const auto h = continuum::leading_order_coefficients(catalog::instantiate("heat_fixed"));
    double hdev = 0.0;
    for (const auto& [term, c] : h.coefficients) {
        const double w = term == "u_t" ? 1.0 : term == "u_xx" ? -1.0 : 0.0;
        hdev = std::max(hdev, std::abs(c - w));
    }
    if (hdev > 1e-4) o.fail("heat_fixed limit deviation " + sci(hdev));
    o.note("heat dev " + sci(hdev));

    const double cv = continuum::verify_change_of_variables(1.0).max_relative_residual;
    const double neg = continuum::verify_change_of_variables(1.0, continuum::BetaScaling::Corrected, 2.0).max_relative_residual;
    if (cv > 1e-8) o.fail("change of variables residual " + sci(cv));
    if (neg <= 1e-2) o.fail("negative control residual " + sci(neg));
    o.note("change of variables " + sci(cv) + ", control " + sci(neg));
    return o;
}

std::string run_tool(const std::vector<std::string>& args) {
#ifdef LATSYM_TOOL
    std::string cmd = LATSYM_TOOL;
    for (const auto& a : args) cmd += " '" + a + "'";
    cmd += " 2>/dev/null";
    std::string out;
    if (FILE* p = popen(cmd.c_str(), "r")) {
        char buf[4096];
        std::size_t n;
        while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
        pclose(p);
    }
    return out;
#else
    std::ostringstream out, err;
    cli::run(args, out, err);
    return out.str();
#endif
}

Outcome determinism() {
    Outcome o;
    const auto field_file = (std::filesystem::temp_directory_path() / "latsym_acceptance_fields.txt").string();
    std::ofstream(field_file) << "P0: xi = 0; tau = 1; phi = 0\nW: xi = 0; tau = 0; phi = u\n";
    const std::vector<std::vector<std::string>> commands = {
        {"find", "--scheme", "heat_galilei", "--seed", "42", "--json"},
        {"find", "--scheme", "lorentz", "--param", "f=power", "--seed", "7", "--samples", "200", "--json"},
        {"find", "--scheme", "burgers_linearizable", "--deg-x", "2", "--deg-t", "2", "--deg-u", "1", "--samples", "300", "--seed", "42", "--json"},
        {"verify", "--scheme", "heat_exponential", "--field", field_file, "--json"},
        {"flow", "--scheme", "heat_galilei", "--field", field_file, "--lambda", "0.3", "--json"},
        {"lattice", "--scheme", "heat_exponential", "--m-range", "0:8", "--n-range", "0:8", "--json"},
        {"limit", "--scheme", "heat_galilei", "--param", "sigma=2", "--json"}};
    int compared = 0;
    for (const auto& c : commands) {
        const auto a = run_tool(c), b = run_tool(c);
        auto ja = nlohmann::json::parse(a, nullptr, false), jb = nlohmann::json::parse(b, nullptr, false);
        if (ja.is_discarded() || jb.is_discarded()) {
            o.fail(c[0] + " " + c[2] + " produced no report");
            continue;
        }
        ++compared;
        if (ja["deterministic"].dump() != jb["deterministic"].dump()) o.fail(c[0] + " " + c[2] + " differs between runs");
    }
    std::filesystem::remove(field_file);
    o.note(std::to_string(compared) + " reports compared");
    return o;
}

Outcome jacobian_gate() {
    Outcome o;
    double dev = 0.0;
    for (double h2 : {0.25, 1.0, 2.0}) {
        auto e = catalog::instantiate("heat_fixed", std::map<std::string, double>{{"h2", h2}});
        auto sampling = e.sampling;
        sampling.seed = 99;
        lattice::OnShellSampler sampler(e.scheme, sampling);
        for (const auto& c : sampler.draw(10)) {
            dev = std::max(dev, std::abs(std::abs(lattice::jacobian_nondegeneracy(e.scheme, c)) - 1.0 / h2));
        }
    }
    if (dev > 1e-12) o.fail("heat_fixed determinant deviates from 1/h2 by " + sci(dev));
    o.note("det dev " + sci(dev));

    using dsl::Expression;
    const lattice::StencilBounds b{1, 1, 0, 1};
    lattice::Scheme singular("singular", b,
                             {Expression::parse("x[1,0]-x[0,0]-1"), Expression::parse("t[1,0]-t[0,0]"),
                              Expression::parse("x[0,1]-x[0,0]"), Expression::parse("t[0,1]-t[0,0]-1+0*u[0,1]"),
                              Expression::parse("u[1,0]-2*u[0,0]+u[-1,0]")},
                             {},
                             {dsl::GridRef{dsl::Var::X, {1, 0}}, dsl::GridRef{dsl::Var::T, {1, 0}},
                              dsl::GridRef{dsl::Var::X, {0, 1}}, dsl::GridRef{dsl::Var::T, {0, 1}},
                              dsl::GridRef{dsl::Var::U, {0, 1}}});
    auto c = singular.make_configuration();
    for (std::size_t k = 0; k < c.size(); ++k) {
        const auto p = c.points()[k];
        c.point(k) = {static_cast<double>(p.i), static_cast<double>(p.j), static_cast<double>(p.i * p.i)};
    }
    bool rejected = false;
    try {
        lattice::solve_on_shell(singular, c, {1, 0, 0, 1, 2});
    } catch (const SingularJacobian&) {
        rejected = true;
    }
    if (lattice::jacobian_nondegeneracy(singular, c) != 0.0 || !rejected) o.fail("structurally singular scheme accepted");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"catalog self-test", catalog_self_test},
        {"finder dimensions", finder_dimensions},
        {"held-out soundness", soundness},
        {"flow invariance", flow_invariance},
        {"Lie algebra", lie_algebra},
        {"continuum limits", continuum_limits},
        {"determinism", determinism},
        {"Jacobian gate", jacobian_gate}};
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::string detail;
        for (const auto& n : o.notes) detail += (detail.empty() ? "" : "; ") + n;
        std::printf("%s criterion %zu (%s, %.1f s): %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), secs,
                    detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures;
}
