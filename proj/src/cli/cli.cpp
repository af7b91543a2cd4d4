#include "latsym/cli/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "latsym/catalog/catalog.hpp"
#include "latsym/cli/io.hpp"
#include "latsym/continuum/continuum.hpp"
#include "latsym/errors.hpp"
#include "latsym/finder/catalog_runs.hpp"
#include "latsym/finder/finder.hpp"
#include "latsym/flow/flow.hpp"
#include "latsym/lattice/scheme_file.hpp"
#include "latsym/symmetry/bracket.hpp"
#include "latsym/symmetry/prolong.hpp"

namespace latsym::cli {

namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Args {
    std::string command;
    std::string scheme;
    std::string scheme_file;
    std::vector<std::string> params;
    int deg_x = 2, deg_t = 2, deg_u = 1;
    std::vector<std::string> basis;
    int samples = 0;
    std::uint64_t seed = 1;
    std::optional<double> tol;
    std::optional<double> lambda;
    std::string field, grid, out, svg, report, probe;
    std::string m_range, n_range;
    bool json_out = false;
};

struct Resolved {
    std::optional<catalog::CatalogEntry> entry;
    lattice::Scheme scheme;
    lattice::IndexWindow window{0, 19, 0, 19};
    lattice::SamplingOptions sampling;
    std::vector<std::string> extra_basis;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::pair<int, int> parse_range(const std::string& text, const char* flag) {
    int a = 0, b = 0, used = 0;
    if (std::sscanf(text.c_str(), "%d:%d%n", &a, &b, &used) != 2 || static_cast<std::size_t>(used) != text.size() || b < a) {
        throw UsageError(std::string(flag) + " expects a:b with a <= b, got '" + text + "'");
    }
    return {a, b};
}

std::map<std::string, std::string> param_map(const std::vector<std::string>& params) {
    std::map<std::string, std::string> out;
    for (const auto& p : params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--param expects k=v, got '" + p + "'");
        out[p.substr(0, eq)] = p.substr(eq + 1);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double d = 0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size()) throw UsageError("parameter " + key + " expects a number, got '" + v + "'");
    return d;
}

Resolved resolve(const Args& a, bool required = true) {
    Resolved r;
    if (!a.scheme.empty() && !a.scheme_file.empty()) throw UsageError("give either --scheme or --scheme-file, not both");
    const auto params = param_map(a.params);
    if (!a.scheme.empty()) {
        r.entry = catalog::instantiate(a.scheme, params);
        r.scheme = r.entry->scheme;
        r.window = r.entry->window;
        r.sampling = r.entry->sampling;
        r.extra_basis = r.entry->extra_basis;
    } else if (!a.scheme_file.empty()) {
        auto f = lattice::read_scheme_file(a.scheme_file);
        std::map<std::string, double> overrides;
        for (const auto& [k, v] : params) overrides[k] = to_double(k, v);
        r.scheme = f.scheme.with_params(overrides);
        if (f.window) r.window = *f.window;
    } else if (required) {
        throw UsageError("missing --scheme ID or --scheme-file FILE");
    }
    if (!a.m_range.empty()) std::tie(r.window.m_lo, r.window.m_hi) = parse_range(a.m_range, "--m-range");
    if (!a.n_range.empty()) std::tie(r.window.n_lo, r.window.n_hi) = parse_range(a.n_range, "--n-range");
    r.sampling.seed = a.seed;
    return r;
}

json params_json(const lattice::Scheme& s) {
    json j = json::object();
    for (const auto& [k, v] : s.params()) j[k] = v;
    return j;
}

json residual_json(const lattice::ResidualVector& r) {
    json j = json::array();
    for (double v : r) j.push_back(v);
    return j;
}

double max_of(const lattice::ResidualVector& r) { return *std::max_element(r.begin(), r.end()); }

std::shared_ptr<const symmetry::AnsatzBasis> ansatz(const Args& a, const Resolved& r) {
    if (a.deg_x < 0 || a.deg_t < 0 || a.deg_u < 0) throw UsageError("ansatz degrees must be non-negative");
    auto registered = a.basis.empty() ? r.extra_basis : a.basis;
    return std::make_shared<symmetry::AnsatzBasis>(a.deg_x, a.deg_t, a.deg_u, registered, r.scheme.params(),
                                                   r.scheme.light_cone());
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream f(path);
    if (!f) throw UsageError("cannot write '" + path + "'");
    body(f);
    if (!f) throw UsageError("error writing '" + path + "'");
}

lattice::GridSolution make_grid(const Resolved& r) {
    if (!r.scheme.seed()) throw UsageError("scheme '" + r.scheme.name() + "' declares no seed data; pass --grid FILE");
    return lattice::propagate_grid(r.scheme, lattice::make_seed(r.scheme, r.window), r.window);
}

json structure_json(const std::vector<symmetry::VectorField>& fields, const std::vector<std::string>& names,
                    std::ostream* human) {
    json j;
    try {
        auto sc = finder::structure_constants(fields);
        j["closure_residual"] = sc.closure_residual;
        j["closed"] = sc.closed();
        json list = json::array();
        for (std::size_t i = 0; i < fields.size(); ++i) {
            for (std::size_t k = i + 1; k < fields.size(); ++k) {
                json terms = json::object();
                std::string text;
                for (std::size_t l = 0; l < fields.size(); ++l) {
                    const double c = sc.c[i][k][l];
                    if (c == 0.0) continue;
                    terms[names[l]] = c;
                    text += (text.empty() ? "" : " + ") + num(c) + " " + names[l];
                }
                if (terms.empty()) continue;
                list.push_back({{"pair", {names[i], names[k]}}, {"bracket", terms}});
                if (human) *human << "  [" << names[i] << ", " << names[k] << "] = " << text << "\n";
            }
        }
        j["brackets"] = list;
        if (human) *human << "  closure residual " << num(sc.closure_residual) << (sc.closed() ? " (closed)" : " (NOT closed)") << "\n";
    } catch (const SpanEscape& e) {
        j["closure_residual"] = nullptr;
        j["closed"] = false;
        j["error"] = e.what();
        if (human) *human << "  brackets leave the ansatz span: " << e.what() << "\n";
    }
    return j;
}

int cmd_list(const Args&, json& res, std::ostream& human) {
    human << catalog::list_text();
    json ids = json::array();
    for (const auto& id : catalog::scheme_ids()) {
        auto e = catalog::instantiate(id);
        json params = json::object();
        for (const auto& p : e.params) params[p.name] = p.value;
        ids.push_back({{"id", id}, {"params", params}});
    }
    res["schemes"] = ids;
    return kExitOk;
}

int cmd_find(const Args& a, json& res, std::ostream& human) {
    auto r = resolve(a);
    auto basis = ansatz(a, r);
    finder::FinderOptions opts = r.entry ? finder::options_for(*r.entry) : finder::FinderOptions{};
    opts.sampling = r.sampling;
    opts.seed = a.seed;
    opts.samples = a.samples;
    if (a.tol) opts.cutoff = *a.tol;
    if (!r.entry) opts.oracle.clear();
    auto b = finder::find_symmetries(r.scheme, basis, opts);

    auto held_sampling = r.sampling;
    held_sampling.seed = a.seed + 1000003;
    const auto held = finder::verify_fields(r.scheme, b.fields, held_sampling, 100);

    human << "scheme " << r.scheme.name() << ", ansatz " << basis->description() << "\n";
    human << "samples " << b.samples << ", rows " << b.rows << ", coefficients " << b.coefficients << ", rank " << b.rank
          << "\n";
    human << "finite sector " << b.dimension(finder::Sector::Finite) << ", superposition sector "
          << b.dimension(finder::Sector::Superposition) << "\n";
    json fields = json::array();
    std::vector<symmetry::VectorField> finite;
    std::vector<std::string> finite_names;
    for (std::size_t k = 0; k < b.size(); ++k) {
        const auto text = b.fields[k].to_text();
        human << "  " << b.names[k] << " [" << finder::sector_name(b.sectors[k]) << "]: " << text
              << "   (held-out " << num(held[k]) << ")\n";
        fields.push_back({{"name", b.names[k]},
                          {"sector", finder::sector_name(b.sectors[k])},
                          {"field", text},
                          {"held_out_residual", held[k]}});
        if (b.sectors[k] == finder::Sector::Finite) {
            finite.push_back(b.fields[k]);
            finite_names.push_back(b.names[k]);
        }
    }
    human << "finite-sector brackets:\n";
    json sv = json::array();
    for (double s : b.singular_values) sv.push_back(s);
    res["ansatz"] = {{"description", basis->description()},
                     {"deg_x", a.deg_x},
                     {"deg_t", a.deg_t},
                     {"deg_u", a.deg_u},
                     {"registered", basis->registered_text()}};
    res["samples"] = b.samples;
    res["rows"] = b.rows;
    res["coefficients"] = b.coefficients;
    res["rank"] = b.rank;
    res["dimension"] = {{"finite", b.dimension(finder::Sector::Finite)},
                        {"superposition", b.dimension(finder::Sector::Superposition)},
                        {"total", b.size()}};
    res["fields"] = fields;
    res["singular_values"] = sv;
    res["annihilation"] = b.annihilation;
    res["held_out_max"] = held.empty() ? 0.0 : *std::max_element(held.begin(), held.end());
    res["finite_structure"] = structure_json(finite, finite_names, &human);
    if (!a.out.empty()) {
        std::vector<NamedField> nf;
        for (std::size_t k = 0; k < b.size(); ++k) nf.push_back({b.names[k], b.fields[k].to_text()});
        write_file(a.out, [&](std::ostream& os) { write_fields(os, nf); });
    }
    return kExitOk;
}

int cmd_verify(const Args& a, json& res, std::ostream& human) {
    if (a.field.empty()) throw UsageError("verify needs --field FILE");
    auto r = resolve(a);
    const auto fields = read_field_file(a.field);
    const double tol = a.tol.value_or(1e-7);
    const int count = a.samples > 0 ? a.samples : 100;
    lattice::OnShellSampler sampler(r.scheme, r.sampling);
    const auto configs = sampler.draw(count);
    bool all = true;
    json list = json::array();
    human << "scheme " << r.scheme.name() << ", " << count << " on-shell configurations, tolerance " << num(tol) << "\n";
    for (const auto& f : fields) {
        auto v = symmetry::ExpressionField::from_text(f.text, r.scheme.params());
        lattice::ResidualVector worst{};
        for (const auto& c : configs) {
            auto pr = symmetry::prolonged_action(v, r.scheme, c);
            for (int k = 0; k < lattice::kResidualCount; ++k) {
                worst[static_cast<std::size_t>(k)] = std::max(worst[static_cast<std::size_t>(k)], std::abs(pr[static_cast<std::size_t>(k)]));
            }
        }
        const bool ok = max_of(worst) <= tol;
        all = all && ok;
        human << "  " << f.name << ": max |pr X E| = " << num(max_of(worst)) << (ok ? "  symmetry" : "  NOT a symmetry") << "\n";
        list.push_back({{"name", f.name}, {"field", f.text}, {"max_residual", max_of(worst)}, {"per_equation", residual_json(worst)}, {"symmetry", ok}});
    }
    res["samples"] = count;
    res["tolerance"] = tol;
    res["fields"] = list;
    res["all_symmetries"] = all;
    return all ? kExitOk : kExitNumerical;
}

int cmd_lattice(const Args& a, json& res, std::ostream& human) {
    auto r = resolve(a);
    auto g = make_grid(r);
    const auto mr = lattice::max_residuals(r.scheme, g);
    const auto& w = g.window();
    human << "scheme " << r.scheme.name() << ", window m " << w.m_lo << ":" << w.m_hi << ", n " << w.n_lo << ":" << w.n_hi
          << ", " << w.width() * w.height() << " points, max residual " << num(max_of(mr)) << "\n";
    res["window"] = {{"m", {w.m_lo, w.m_hi}}, {"n", {w.n_lo, w.n_hi}}};
    res["points"] = w.width() * w.height();
    res["max_residuals"] = residual_json(mr);
    json corners = json::array();
    for (auto [m, n] : {std::pair{w.m_lo, w.n_lo}, {w.m_hi, w.n_lo}, {w.m_lo, w.n_hi}, {w.m_hi, w.n_hi}}) {
        const auto& p = g.at(m, n);
        corners.push_back({{"m", m}, {"n", n}, {"x", p[0]}, {"t", p[1]}, {"u", p[2]}});
    }
    res["corners"] = corners;
    if (!a.out.empty()) write_file(a.out, [&](std::ostream& os) { lattice::write_csv(os, g); });
    if (!a.svg.empty()) write_file(a.svg, [&](std::ostream& os) { write_svg(os, {{r.scheme.name(), g}}, r.scheme.name()); });
    return kExitOk;
}

int cmd_flow(const Args& a, json& res, std::ostream& human) {
    if (a.field.empty()) throw UsageError("flow needs --field FILE");
    if (!a.lambda) throw UsageError("flow needs --lambda L");
    auto r = resolve(a);
    const auto fields = read_field_file(a.field);
    lattice::GridSolution g;
    if (!a.grid.empty()) {
        std::ifstream f(a.grid);
        if (!f) throw UsageError("cannot open grid file '" + a.grid + "'");
        g = lattice::read_csv(f);
    } else {
        g = make_grid(r);
    }
    const auto before = lattice::max_residuals(r.scheme, g);
    flow::FlowOptions fo;
    fo.lambda = *a.lambda;
    const double tol = a.tol.value_or(1e-7);
    json list = json::array();
    std::vector<SvgSeries> series{{"original", g}};
    bool all = true;
    human << "scheme " << r.scheme.name() << ", lambda " << num(fo.lambda) << ", grid residual before " << num(max_of(before)) << "\n";
    for (const auto& f : fields) {
        auto v = symmetry::ExpressionField::from_text(f.text, r.scheme.params());
        auto t = flow::transform_and_verify(v.function(), g, r.scheme, fo);
        const bool ok = t.max_residual <= tol;
        all = all && ok;
        human << "  " << f.name << ": residual after " << num(t.max_residual) << ", integration error " << num(t.max_error_estimate)
              << (ok ? "  preserved" : "  NOT preserved") << "\n";
        list.push_back({{"name", f.name},
                        {"field", f.text},
                        {"max_residuals", residual_json(t.max_residuals)},
                        {"max_residual", t.max_residual},
                        {"error_estimate", t.max_error_estimate},
                        {"preserved", ok}});
        series.push_back({f.name, t.grid});
    }
    res["lambda"] = fo.lambda;
    res["substeps"] = fo.substeps;
    res["residuals_before"] = residual_json(before);
    res["fields"] = list;
    res["all_preserved"] = all;
    if (!a.out.empty()) write_file(a.out, [&](std::ostream& os) { lattice::write_csv(os, series.back().grid); });
    if (!a.svg.empty()) write_file(a.svg, [&](std::ostream& os) { write_svg(os, series, r.scheme.name() + " flow"); });
    return all ? kExitOk : kExitNumerical;
}

int cmd_limit(const Args& a, json& res, std::ostream& human) {
    auto r = resolve(a);
    if (!r.entry || !r.entry->continuum) {
        throw UsageError("limit needs a catalog scheme with a continuum scaling (not " + r.scheme.name() + ")");
    }
    continuum::LimitProbe probe;
    probe.function = a.probe;
    auto fit = continuum::leading_order_coefficients(*r.entry, probe);
    human << "scheme " << r.entry->label << ", probe u = " << fit.probe << "\n";
    json coef = json::object(), expected = json::object();
    double worst = 0.0;
    for (const auto& term : fit.dictionary) {
        const double c = fit.coefficients.at(term);
        auto it = r.entry->continuum->expected.find(term);
        const double want = it == r.entry->continuum->expected.end() ? 0.0 : it->second;
        worst = std::max(worst, std::abs(c - want) / std::max(1.0, std::abs(want)));
        coef[term] = c;
        expected[term] = want;
        human << "  " << term << ": " << num(c) << "   (expected " << num(want) << ")\n";
    }
    human << "remainder order " << num(fit.order) << ", fit condition " << num(fit.condition) << ", max relative deviation "
          << num(worst) << "\n";
    res["probe"] = fit.probe;
    res["coefficients"] = coef;
    res["expected"] = expected;
    res["max_relative_deviation"] = worst;
    res["order"] = fit.order;
    res["condition"] = fit.condition;
    res["scales"] = fit.scales;
    res["remainder"] = fit.remainder;
    if (r.entry->id == "heat_galilei") {
        const double c = 1.0 / r.scheme.params().at("sigma");
        const auto ok = continuum::verify_change_of_variables(c);
        const auto neg = continuum::verify_change_of_variables(c, continuum::BetaScaling::Corrected, 2.0);
        const auto printed = continuum::verify_change_of_variables(c, continuum::BetaScaling::Printed);
        human << "change of variables to w_beta = w_alphaalpha (c = " << num(c) << "): residual " << num(ok.max_relative_residual)
              << ", non-solution control " << num(neg.max_relative_residual) << ", printed beta scaling "
              << num(printed.max_relative_residual) << "\n";
        res["change_of_variables"] = {{"c", c},
                                      {"residual", ok.max_relative_residual},
                                      {"negative_control", neg.max_relative_residual},
                                      {"printed_scaling_residual", printed.max_relative_residual}};
    }
    return kExitOk;
}

int cmd_bracket(const Args& a, json& res, std::ostream& human) {
    if (a.field.empty()) throw UsageError("bracket needs --field FILE with at least two fields");
    auto r = resolve(a, false);
    const auto nf = read_field_file(a.field);
    if (nf.size() < 2) throw UsageError("bracket needs at least two fields");
    auto basis = ansatz(a, r);
    std::vector<symmetry::VectorField> fields;
    std::vector<std::string> names;
    for (const auto& f : nf) {
        fields.push_back(symmetry::VectorField::from_text(f.text, basis, r.scheme.params()));
        names.push_back(f.name);
    }
    json list = json::array();
    human << "ansatz " << basis->description() << "\n";
    for (std::size_t i = 0; i < fields.size(); ++i) {
        for (std::size_t k = i + 1; k < fields.size(); ++k) {
            auto b = symmetry::lie_bracket_ex(fields[i], fields[k]);
            const auto text = b.field.to_text();
            human << "  [" << names[i] << ", " << names[k] << "] = " << text << "\n";
            list.push_back({{"pair", {names[i], names[k]}}, {"bracket", text}, {"symbolic", b.symbolic}, {"residual", b.residual}});
        }
    }
    human << "structure constants:\n";
    res["brackets"] = list;
    res["structure"] = structure_json(fields, names, &human);
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    CLI::App app{"Lie point symmetries of difference schemes on transforming lattices", "latsym"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    Args a;
    app.add_option("--scheme", a.scheme, "catalog scheme id");
    app.add_option("--scheme-file", a.scheme_file, "custom scheme (JSON)");
    app.add_option("--param", a.params, "scheme parameter k=v (repeatable)");
    app.add_option("--deg-x", a.deg_x, "ansatz degree in x");
    app.add_option("--deg-t", a.deg_t, "ansatz degree in t (or y)");
    app.add_option("--deg-u", a.deg_u, "ansatz degree in u");
    app.add_option("--basis", a.basis, "registered basis function, DSL text (repeatable)");
    app.add_option("--samples", a.samples, "number of on-shell samples");
    app.add_option("--seed", a.seed, "random seed");
    app.add_option("--tol", a.tol, "tolerance (finder cutoff, verify/flow acceptance)");
    app.add_option("--lambda", a.lambda, "group parameter for flow");
    app.add_option("--field", a.field, "field file");
    app.add_option("--grid", a.grid, "grid CSV (m,n,x,t,u)");
    app.add_option("--m-range", a.m_range, "index window a:b in m");
    app.add_option("--n-range", a.n_range, "index window a:b in n");
    app.add_option("--out", a.out, "output file (fields or CSV)");
    app.add_option("--svg", a.svg, "SVG scatter of lattice points");
    app.add_option("--probe", a.probe, "test function for limit, DSL text in x, t");
    app.add_option("--report", a.report, "write the JSON report to this file");
    app.add_flag("--json", a.json_out, "print the JSON report instead of the summary");
    const std::vector<std::pair<const char*, const char*>> commands = {
        {"list", "list catalog schemes"},
        {"find", "compute the symmetry algebra under a finite ansatz"},
        {"verify", "check fields against random on-shell configurations"},
        {"flow", "transform a lattice solution along fields"},
        {"lattice", "propagate a lattice solution"},
        {"limit", "fit the continuum limit of a catalog scheme"},
        {"bracket", "Lie brackets and structure constants of fields"}};
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "latsym: " << e.what() << "\n";
        return kExitUsage;
    }
    a.command = app.get_subcommands().front()->get_name();

    json deterministic;
    deterministic["command"] = a.command;
    // the report's own location does not affect its content
    std::vector<std::string> echo;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--report") {
            ++k;
        } else if (args[k].rfind("--report=", 0) != 0) {
            echo.push_back(args[k]);
        }
    }
    deterministic["argv"] = echo;
    json results = json::object();
    std::ostringstream human;
    int code = kExitOk;
    try {
        if (a.command == "list") code = cmd_list(a, results, human);
        if (a.command == "find") code = cmd_find(a, results, human);
        if (a.command == "verify") code = cmd_verify(a, results, human);
        if (a.command == "flow") code = cmd_flow(a, results, human);
        if (a.command == "lattice") code = cmd_lattice(a, results, human);
        if (a.command == "limit") code = cmd_limit(a, results, human);
        if (a.command == "bracket") code = cmd_bracket(a, results, human);
    } catch (const NumericalError& e) {
        err << "latsym: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const dsl::EvalError& e) {
        err << "latsym: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "latsym: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        err << "latsym: " << e.what() << "\n";
        return kExitUsage;
    }
    if (a.command != "list") {
        deterministic["scheme"] = !a.scheme.empty() ? a.scheme : a.scheme_file;
        auto r = resolve(a, false);
        if (!a.scheme.empty() || !a.scheme_file.empty()) deterministic["params"] = params_json(r.scheme);
        deterministic["seed"] = a.seed;
    }
    deterministic["results"] = results;
    deterministic["exit_code"] = code;
    json report;
    report["deterministic"] = deterministic;
    report["timing"] = {{"wall_seconds",
                         std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    if (a.json_out) {
        out << report.dump(2) << "\n";
    } else {
        out << human.str();
    }
    if (!a.report.empty()) {
        std::ofstream f(a.report);
        if (!f) {
            err << "latsym: cannot write '" << a.report << "'\n";
            return kExitUsage;
        }
        f << report.dump(2) << "\n";
    }
    return code;
}

}  // namespace latsym::cli
