#include "latsym/lattice/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "latsym/errors.hpp"

namespace latsym::lattice {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

GridSolution::GridSolution(IndexWindow w)
    : window_(w), values_(static_cast<std::size_t>(std::max(0, w.width() * w.height())), {kNaN, kNaN, kNaN}) {
    if (w.m_hi < w.m_lo || w.n_hi < w.n_lo) throw std::invalid_argument("empty index window");
}

std::size_t GridSolution::index(int m, int n) const {
    if (!window_.contains(m, n)) {
        throw std::out_of_range("site (" + std::to_string(m) + "," + std::to_string(n) + ") outside grid window");
    }
    return static_cast<std::size_t>((n - window_.n_lo) * window_.width() + (m - window_.m_lo));
}

std::array<double, 3>& GridSolution::at(int m, int n) { return values_[index(m, n)]; }
const std::array<double, 3>& GridSolution::at(int m, int n) const { return values_[index(m, n)]; }

SiteMap make_seed(const Scheme& s, const IndexWindow& window) {
    if (!s.seed()) throw std::invalid_argument("scheme '" + s.name() + "' declares no seed recipe");
    return make_seed(s, *s.seed(), window);
}

SiteMap make_seed(const Scheme& s, const SeedRecipe& recipe, const IndexWindow& window) {
    const auto& b = s.bounds();
    const int steps = window.n_hi - window.n_lo;
    int m_min = window.m_lo - steps * std::max(b.i1, 1) - 2;
    int m_max = window.m_hi + steps * std::max(b.i2, 1) + 2;
    if (recipe.columns > 0) {
        // characteristic data: the rows only need to cover the window
        m_min = window.m_lo - recipe.columns + 1;
        m_max = window.m_hi + b.i2;
    }

    auto params_for = [&](const Expression& e, int m, int n) {
        std::vector<double> out;
        for (const auto& p : e.parameters()) {
            if (p == "m") {
                out.push_back(m);
            } else if (p == "n") {
                out.push_back(n);
            } else if (auto it = s.params().find(p); it != s.params().end()) {
                out.push_back(it->second);
            } else {
                throw std::invalid_argument("seed recipe uses unknown parameter '" + p + "'");
            }
        }
        return out;
    };

    auto site_value = [&](int m, int n) {
        std::array<double, 3> v{};
        v[0] = recipe.x.evaluate<double>({}, params_for(recipe.x, m, n));
        v[1] = recipe.t.evaluate<double>({}, params_for(recipe.t, m, n));
        std::vector<double> refs;
        for (const auto& r : recipe.u.refs()) {
            if (r.at != Offset{0, 0} || r.var == Var::U) {
                throw std::invalid_argument("seed profile u may only use bare x and t");
            }
            refs.push_back(v[static_cast<std::size_t>(r.var)]);
        }
        v[2] = recipe.u.evaluate<double>(refs, params_for(recipe.u, m, n));
        return v;
    };

    SiteMap seed;
    for (int n = window.n_lo - recipe.rows + 1; n <= window.n_lo; ++n) {
        for (int m = m_min; m <= m_max; ++m) seed[{m, n}] = site_value(m, n);
    }
    for (int m = window.m_lo - recipe.columns + 1; m <= window.m_lo && recipe.columns > 0; ++m) {
        for (int n = window.n_lo - recipe.rows + 1; n <= window.n_hi + 1; ++n) seed[{m, n}] = site_value(m, n);
    }
    return seed;
}

namespace {

int var_idx(Var v) { return static_cast<int>(v); }

// Attempt the placement at (m, n). Returns true when new values were written.
bool try_place(const Scheme& s, SiteMap& sites, int m, int n) {
    StencilConfiguration c = s.make_configuration();
    for (std::size_t k = 0; k < c.size(); ++k) {
        Offset o = c.points()[k];
        auto it = sites.find({m + o.i, n + o.j});
        if (it != sites.end()) c.point(k) = it->second;
    }
    for (const auto& r : s.active_refs()) {
        if (!s.is_solve_for(r) && !c.is_bound(r)) return false;
    }
    bool any_unknown = false;
    for (const auto& r : s.solve_for()) any_unknown = any_unknown || !c.is_bound(r);
    if (!any_unknown) return false;

    auto known = [&](int mm, int nn, Var v, double& out) {
        auto it = sites.find({mm, nn});
        if (it == sites.end()) return false;
        out = it->second[static_cast<std::size_t>(var_idx(v))];
        return !std::isnan(out);
    };
    std::array<double, kResidualCount> guess{};
    for (int v = 0; v < kResidualCount; ++v) {
        GridRef r = s.solve_for()[static_cast<std::size_t>(v)];
        const int mm = m + r.at.i;
        const int nn = n + r.at.j;
        double a = 0.0, b = 0.0, g = 0.0;
        if (known(mm, nn, r.var, a)) {
            g = a;
        } else if (known(mm, nn - 1, r.var, a)) {
            g = known(mm, nn - 2, r.var, b) ? 2 * a - b : a + (r.var == Var::T ? 1.0 : 0.0);
        } else if (known(mm - 1, nn, r.var, a)) {
            g = known(mm - 2, nn, r.var, b) ? 2 * a - b : a + (r.var == Var::X ? 1.0 : 0.0);
        }
        guess[static_cast<std::size_t>(v)] = g;
    }

    StencilConfiguration solved;
    try {
        solved = solve_on_shell(s, c, guess);
    } catch (const NumericalError& e) {
        throw ConvergenceFailure("propagate_grid: site (" + std::to_string(m) + "," + std::to_string(n) +
                                 "): " + e.what());
    } catch (const dsl::EvalError& e) {
        throw ConvergenceFailure("propagate_grid: site (" + std::to_string(m) + "," + std::to_string(n) +
                                 "): " + e.what());
    }

    for (const auto& r : s.solve_for()) {
        const double v = solved.get(r);
        auto& site = sites.try_emplace({m + r.at.i, n + r.at.j}, std::array<double, 3>{kNaN, kNaN, kNaN}).first->second;
        double& slot = site[static_cast<std::size_t>(var_idx(r.var))];
        if (std::isnan(slot)) {
            slot = v;
        } else if (std::abs(slot - v) > 1e-9 * (1.0 + std::abs(v))) {
            throw NumericalError("propagate_grid: seed data inconsistent with the scheme at site (" +
                                 std::to_string(m + r.at.i) + "," + std::to_string(n + r.at.j) + ") for " +
                                 std::string(1, dsl::var_letter(r.var)));
        }
    }
    return true;
}

}  // namespace

GridSolution propagate_grid(const Scheme& s, const SiteMap& seed, const IndexWindow& window) {
    if (seed.empty()) throw std::invalid_argument("propagate_grid: empty seed");
    SiteMap sites = seed;
    int m_min = seed.begin()->first.first;
    int m_max = m_min;
    int n_min = seed.begin()->first.second;
    for (const auto& [key, v] : seed) {
        m_min = std::min(m_min, key.first);
        m_max = std::max(m_max, key.first);
        n_min = std::min(n_min, key.second);
    }
    const auto& b = s.bounds();
    for (int sweep = 0; sweep < 4; ++sweep) {
        bool progress = false;
        for (int n = n_min; n <= window.n_hi; ++n) {
            for (int m = m_min - b.i2; m <= m_max + b.i1; ++m) progress = try_place(s, sites, m, n) || progress;
        }
        if (!progress) break;
    }

    GridSolution g(window);
    for (int n = window.n_lo; n <= window.n_hi; ++n) {
        for (int m = window.m_lo; m <= window.m_hi; ++m) {
            auto it = sites.find({m, n});
            if (it == sites.end() || std::isnan(it->second[0]) || std::isnan(it->second[1]) ||
                std::isnan(it->second[2])) {
                throw std::invalid_argument("propagate_grid: insufficient seed data, site (" + std::to_string(m) +
                                            "," + std::to_string(n) + ") could not be determined");
            }
            g.at(m, n) = it->second;
        }
    }
    g.on_shell_tolerance = SolveOptions{}.tolerance;
    return g;
}

bool placement(const Scheme& s, const GridSolution& g, int m, int n, StencilConfiguration& out) {
    out = s.make_configuration();
    for (std::size_t k = 0; k < out.size(); ++k) {
        Offset o = out.points()[k];
        if (!g.window().contains(m + o.i, n + o.j)) return false;
        out.point(k) = g.at(m + o.i, n + o.j);
    }
    return true;
}

ResidualVector max_residuals(const Scheme& s, const GridSolution& g) {
    ResidualVector worst{};
    StencilConfiguration c;
    const auto& w = g.window();
    for (int n = w.n_lo; n <= w.n_hi; ++n) {
        for (int m = w.m_lo; m <= w.m_hi; ++m) {
            if (!placement(s, g, m, n, c)) continue;
            auto r = residuals(s, c);
            for (int a = 0; a < kResidualCount; ++a) {
                auto k = static_cast<std::size_t>(a);
                worst[k] = std::max(worst[k], std::abs(r[k]));
            }
        }
    }
    return worst;
}

void write_csv(std::ostream& os, const GridSolution& g) {
    os << "m,n,x,t,u\n";
    const auto& w = g.window();
    char buf[128];
    for (int n = w.n_lo; n <= w.n_hi; ++n) {
        for (int m = w.m_lo; m <= w.m_hi; ++m) {
            const auto& v = g.at(m, n);
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", m, n, v[0], v[1], v[2]);
            os << buf;
        }
    }
}

GridSolution read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("CSV: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const bool has_u = line == "m,n,x,t,u";
    if (!has_u && line != "m,n,x,t") throw std::invalid_argument("CSV: expected header m,n,x,t[,u], got '" + line + "'");

    struct Row { int m, n; double x, t, u; };
    std::vector<Row> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        Row r{};
        r.u = 0.0;
        int consumed = 0;
        int got = has_u ? std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf%n", &r.m, &r.n, &r.x, &r.t, &r.u, &consumed)
                        : std::sscanf(line.c_str(), "%d,%d,%lf,%lf%n", &r.m, &r.n, &r.x, &r.t, &consumed);
        if (got != (has_u ? 5 : 4) || static_cast<std::size_t>(consumed) != line.size()) {
            throw std::invalid_argument("CSV: malformed row at line " + std::to_string(lineno));
        }
        rows.push_back(r);
    }
    if (rows.empty()) throw std::invalid_argument("CSV: no data rows");
    IndexWindow w{rows[0].m, rows[0].m, rows[0].n, rows[0].n};
    for (const auto& r : rows) {
        w.m_lo = std::min(w.m_lo, r.m);
        w.m_hi = std::max(w.m_hi, r.m);
        w.n_lo = std::min(w.n_lo, r.n);
        w.n_hi = std::max(w.n_hi, r.n);
    }
    GridSolution g(w);
    for (const auto& r : rows) g.at(r.m, r.n) = {r.x, r.t, r.u};
    for (int n = w.n_lo; n <= w.n_hi; ++n) {
        for (int m = w.m_lo; m <= w.m_hi; ++m) {
            if (std::isnan(g.at(m, n)[0])) throw std::invalid_argument("CSV: grid window is not rectangular");
        }
    }
    return g;
}

}  // namespace latsym::lattice
