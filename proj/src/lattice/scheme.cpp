#include "latsym/lattice/scheme.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "latsym/errors.hpp"

namespace latsym::lattice {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int var_index(Var v) { return static_cast<int>(v); }

}  // namespace

StencilConfiguration::StencilConfiguration(std::vector<Offset> points)
    : points_(std::move(points)), values_(points_.size(), {kNaN, kNaN, kNaN}) {}

int StencilConfiguration::index_of(Offset o) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), o);
    if (it == points_.end() || *it != o) return -1;
    return static_cast<int>(it - points_.begin());
}

double StencilConfiguration::get(GridRef r) const {
    int k = index_of(r.at);
    if (k < 0) throw std::out_of_range("stencil point " + dsl::to_string(r) + " not in configuration");
    return values_[static_cast<std::size_t>(k)][static_cast<std::size_t>(var_index(r.var))];
}

void StencilConfiguration::set(GridRef r, double v) {
    int k = index_of(r.at);
    if (k < 0) throw std::out_of_range("stencil point " + dsl::to_string(r) + " not in configuration");
    values_[static_cast<std::size_t>(k)][static_cast<std::size_t>(var_index(r.var))] = v;
}

bool StencilConfiguration::is_bound(GridRef r) const {
    int k = index_of(r.at);
    return k >= 0 && !std::isnan(values_[static_cast<std::size_t>(k)][static_cast<std::size_t>(var_index(r.var))]);
}

std::array<GridRef, kResidualCount> default_solve_for(const StencilBounds& b) {
    return {GridRef{Var::X, {b.i2, 0}}, GridRef{Var::T, {b.i2, 0}}, GridRef{Var::X, {0, b.j2}},
            GridRef{Var::T, {0, b.j2}}, GridRef{Var::U, {b.i2, b.j2}}};
}

Scheme::Scheme(std::string name, StencilBounds bounds, std::array<Expression, kResidualCount> residuals,
               std::map<std::string, double> params, std::array<GridRef, kResidualCount> solve_for, bool light_cone,
               std::optional<SeedRecipe> seed)
    : name_(std::move(name)),
      bounds_(bounds),
      residuals_(std::move(residuals)),
      params_(std::move(params)),
      solve_for_(solve_for),
      light_cone_(light_cone),
      seed_(std::move(seed)) {
    compile();
}

void Scheme::compile() {
    if (bounds_.i1 < 0 || bounds_.i2 < 0 || bounds_.j1 < 0 || bounds_.j2 < 0) {
        throw std::invalid_argument("scheme '" + name_ + "': stencil bounds must be non-negative");
    }
    std::set<GridRef> active;
    std::set<Offset> points;
    for (int a = 0; a < kResidualCount; ++a) {
        for (const auto& r : residuals_[static_cast<std::size_t>(a)].refs()) {
            if (!bounds_.contains(r.at)) {
                throw std::invalid_argument("scheme '" + name_ + "': residual E" + std::to_string(a + 1) +
                                            " references " + dsl::to_string(r) + " outside the stencil bounds");
            }
            active.insert(r);
            points.insert(r.at);
        }
    }
    active_.assign(active.begin(), active.end());
    points_.assign(points.begin(), points.end());

    std::set<GridRef> unknowns(solve_for_.begin(), solve_for_.end());
    if (unknowns.size() != kResidualCount) {
        throw std::invalid_argument("scheme '" + name_ + "': solve-for unknowns must be five distinct references");
    }
    for (const auto& r : solve_for_) {
        if (!active.contains(r)) {
            throw std::invalid_argument("scheme '" + name_ + "': solve-for unknown " + dsl::to_string(r) +
                                        " does not appear in any residual");
        }
    }

    for (int a = 0; a < kResidualCount; ++a) {
        const auto& e = residuals_[static_cast<std::size_t>(a)];
        auto& pv = residual_params_[static_cast<std::size_t>(a)];
        pv.clear();
        for (const auto& p : e.parameters()) {
            auto it = params_.find(p);
            if (it == params_.end()) {
                throw std::invalid_argument("scheme '" + name_ + "': parameter '" + p + "' has no value");
            }
            pv.push_back(it->second);
        }
        auto& sl = slots_[static_cast<std::size_t>(a)];
        sl.clear();
        for (const auto& r : e.refs()) {
            auto it = std::lower_bound(points_.begin(), points_.end(), r.at);
            sl.emplace_back(static_cast<int>(it - points_.begin()), var_index(r.var));
        }
    }
}

bool Scheme::is_solve_for(GridRef r) const {
    return std::find(solve_for_.begin(), solve_for_.end(), r) != solve_for_.end();
}

Scheme Scheme::with_params(const std::map<std::string, double>& overrides) const {
    Scheme out = *this;
    for (const auto& [k, v] : overrides) {
        auto it = out.params_.find(k);
        if (it == out.params_.end()) {
            throw std::invalid_argument("scheme '" + name_ + "' has no parameter '" + k + "'");
        }
        it->second = v;
    }
    out.compile();
    return out;
}

double Scheme::residual_gradient(int a, const StencilConfiguration& c, std::vector<double>& gradient) const {
    const auto& sl = slots_[static_cast<std::size_t>(a)];
    double vals[64];
    if (sl.size() > 64) throw std::length_error("residual references too many grid values");
    for (std::size_t k = 0; k < sl.size(); ++k) {
        vals[k] = c.point(static_cast<std::size_t>(sl[k].first))[static_cast<std::size_t>(sl[k].second)];
    }
    gradient.assign(sl.size(), 0.0);
    return residual(a).value_and_gradient(std::span<const double>(vals, sl.size()), residual_params(a), gradient);
}

double Scheme::residual_value(int a, const StencilConfiguration& c) const {
    const auto& sl = slots_[static_cast<std::size_t>(a)];
    double vals[64];
    if (sl.size() > 64) throw std::length_error("residual references too many grid values");
    for (std::size_t k = 0; k < sl.size(); ++k) {
        vals[k] = c.point(static_cast<std::size_t>(sl[k].first))[static_cast<std::size_t>(sl[k].second)];
    }
    return residual(a).evaluate<double>(std::span<const double>(vals, sl.size()), residual_params(a));
}

ResidualVector residuals(const Scheme& s, const StencilConfiguration& c) {
    ResidualVector out{};
    for (int a = 0; a < kResidualCount; ++a) out[static_cast<std::size_t>(a)] = s.residual_value(a, c);
    return out;
}

ResidualVector residual_scales(const Scheme& s, const StencilConfiguration& c) {
    ResidualVector out{};
    std::vector<double> g;
    for (int a = 0; a < kResidualCount; ++a) {
        s.residual_gradient(a, c, g);
        double scale = 1.0;
        const auto& refs = s.residual(a).refs();
        for (std::size_t k = 0; k < refs.size(); ++k) scale += std::abs(g[k]) * std::abs(c.get(refs[k]));
        out[static_cast<std::size_t>(a)] = scale;
    }
    return out;
}

namespace {

// Residual vector and Jacobian with respect to the solve-for unknowns.
void assemble(const Scheme& s, const StencilConfiguration& c, Eigen::Matrix<double, 5, 1>& r,
              Eigen::Matrix<double, 5, 5>& J) {
    std::vector<double> g;
    J.setZero();
    for (int a = 0; a < kResidualCount; ++a) {
        r(a) = s.residual_gradient(a, c, g);
        const auto& refs = s.residual(a).refs();
        for (std::size_t k = 0; k < refs.size(); ++k) {
            for (int v = 0; v < kResidualCount; ++v) {
                if (refs[k] == s.solve_for()[static_cast<std::size_t>(v)]) J(a, v) = g[k];
            }
        }
    }
}

double scaled_norm(const Eigen::Matrix<double, 5, 1>& r, const ResidualVector& scales) {
    double m = 0.0;
    for (int a = 0; a < kResidualCount; ++a) m = std::max(m, std::abs(r(a)) / scales[static_cast<std::size_t>(a)]);
    return m;
}

}  // namespace

double jacobian_nondegeneracy(const Scheme& s, const StencilConfiguration& c) {
    Eigen::Matrix<double, 5, 1> r;
    Eigen::Matrix<double, 5, 5> J;
    assemble(s, c, r, J);
    return J.determinant();
}

std::optional<double> lattice_cell_jacobian(const StencilConfiguration& c) {
    int o = c.index_of({0, 0});
    int e = c.index_of({1, 0});
    int n = c.index_of({0, 1});
    if (o < 0 || e < 0 || n < 0) return std::nullopt;
    const auto& p0 = c.point(static_cast<std::size_t>(o));
    const auto& pe = c.point(static_cast<std::size_t>(e));
    const auto& pn = c.point(static_cast<std::size_t>(n));
    return (pe[0] - p0[0]) * (pn[1] - p0[1]) - (pn[0] - p0[0]) * (pe[1] - p0[1]);
}

namespace {

// Improves a starting point by sweeps of scalar solves, each residual paired
// with one unknown it contains. Explicit schemes are solved outright this way;
// for the rest it merely moves the guess closer.
void sequential_guess(const Scheme& s, StencilConfiguration& c) {
    std::array<std::vector<int>, kResidualCount> slot;  // slot of each unknown in residual a, or -1
    for (int a = 0; a < kResidualCount; ++a) {
        const auto& refs = s.residual(a).refs();
        for (int v = 0; v < kResidualCount; ++v) {
            auto it = std::find(refs.begin(), refs.end(), s.solve_for()[static_cast<std::size_t>(v)]);
            slot[static_cast<std::size_t>(a)].push_back(it == refs.end() ? -1 : static_cast<int>(it - refs.begin()));
        }
    }
    std::array<int, kResidualCount> perm{0, 1, 2, 3, 4}, best{};
    int best_score = -1;
    do {
        int score = 0;
        for (int a = 0; a < kResidualCount; ++a) score += slot[static_cast<std::size_t>(a)][static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])] >= 0;
        if (score > best_score) {
            best_score = score;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::array<int, kResidualCount> order{0, 1, 2, 3, 4};
    auto unknowns_in = [&](int a) {
        int n = 0;
        for (int k : slot[static_cast<std::size_t>(a)]) n += k >= 0;
        return n;
    };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return unknowns_in(a) < unknowns_in(b); });

    std::vector<double> g;
    for (int sweep = 0; sweep < 4; ++sweep) {
        for (int a : order) {
            const int k = slot[static_cast<std::size_t>(a)][static_cast<std::size_t>(best[static_cast<std::size_t>(a)])];
            if (k < 0) continue;
            const GridRef ref = s.solve_for()[static_cast<std::size_t>(best[static_cast<std::size_t>(a)])];
            for (int it = 0; it < 30; ++it) {
                double val;
                try {
                    val = s.residual_gradient(a, c, g);
                } catch (const dsl::EvalError&) {
                    break;
                }
                const double d = g[static_cast<std::size_t>(k)];
                if (!std::isfinite(val) || !std::isfinite(d) || d == 0.0 || val == 0.0) break;
                const double x0 = c.get(ref);
                double lambda = 1.0;
                bool moved = false;
                for (int h = 0; h < 20 && !moved; ++h, lambda *= 0.5) {
                    c.set(ref, x0 - lambda * val / d);
                    try {
                        double nv = s.residual_value(a, c);
                        moved = std::isfinite(nv) && std::abs(nv) < std::abs(val);
                    } catch (const dsl::EvalError&) {
                    }
                }
                if (!moved) {
                    c.set(ref, x0);
                    break;
                }
            }
        }
    }
}

StencilConfiguration newton(const Scheme& s, StencilConfiguration c, const SolveOptions& opts);

}  // namespace

StencilConfiguration solve_on_shell(const Scheme& s, const StencilConfiguration& free_data,
                                    const std::array<double, kResidualCount>& guess, const SolveOptions& opts) {
    StencilConfiguration c = free_data;
    for (const auto& r : s.active_refs()) {
        if (!s.is_solve_for(r) && !c.is_bound(r)) {
            throw std::invalid_argument("solve_on_shell: free data leaves " + dsl::to_string(r) + " unbound");
        }
    }
    for (int v = 0; v < kResidualCount; ++v) c.set(s.solve_for()[static_cast<std::size_t>(v)], guess[static_cast<std::size_t>(v)]);
    try {
        return newton(s, c, opts);
    } catch (const ConvergenceFailure&) {
    } catch (const SingularJacobian&) {
    }
    sequential_guess(s, c);
    return newton(s, c, opts);
}

namespace {

StencilConfiguration newton(const Scheme& s, StencilConfiguration c, const SolveOptions& opts) {
    Eigen::Matrix<double, 5, 1> r;
    Eigen::Matrix<double, 5, 5> J;
    auto within = [&](const Eigen::Matrix<double, 5, 1>& res, const StencilConfiguration& cfg) {
        auto scales = residual_scales(s, cfg);
        for (int a = 0; a < kResidualCount; ++a) {
            if (!(std::abs(res(a)) <= opts.tolerance * scales[static_cast<std::size_t>(a)])) return false;
        }
        return true;
    };

    bool converged = false;
    for (int it = 0; it < opts.max_iterations; ++it) {
        assemble(s, c, r, J);
        if (!r.allFinite()) throw ConvergenceFailure("solve_on_shell: non-finite residual");
        if (within(r, c)) {
            converged = true;
            break;
        }
        Eigen::PartialPivLU<Eigen::Matrix<double, 5, 5>> lu(J);
        if (std::abs(lu.determinant()) < opts.jacobian_threshold) {
            throw SingularJacobian("solve_on_shell: Jacobian of the scheme with respect to the unknowns is singular (|det| = " +
                                   std::to_string(std::abs(lu.determinant())) + ")");
        }
        Eigen::Matrix<double, 5, 1> step = lu.solve(r);
        const double norm0 = scaled_norm(r, residual_scales(s, c));
        double lambda = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opts.max_halvings; ++h) {
            StencilConfiguration trial = c;
            for (int v = 0; v < kResidualCount; ++v) {
                GridRef ref = s.solve_for()[static_cast<std::size_t>(v)];
                trial.set(ref, c.get(ref) - lambda * step(v));
            }
            Eigen::Matrix<double, 5, 1> rt;
            bool ok = true;
            try {
                for (int a = 0; a < kResidualCount; ++a) rt(a) = s.residual_value(a, trial);
            } catch (const dsl::EvalError&) {
                ok = false;  // stepped onto a pole; keep halving
            }
            if (ok && rt.allFinite() && scaled_norm(rt, residual_scales(s, trial)) < norm0) {
                c = std::move(trial);
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            if (within(r, c) || norm0 <= 1e3 * opts.tolerance) {
                converged = true;  // at the rounding floor
                break;
            }
            throw ConvergenceFailure("solve_on_shell: damped Newton step failed to reduce the residual");
        }
    }
    if (!converged) {
        assemble(s, c, r, J);
        if (!within(r, c)) throw ConvergenceFailure("solve_on_shell: Newton did not converge in " +
                                                    std::to_string(opts.max_iterations) + " iterations");
    }

    // One polishing step when it helps; Newton is quadratic so this lands at rounding level.
    assemble(s, c, r, J);
    Eigen::PartialPivLU<Eigen::Matrix<double, 5, 5>> lu(J);
    double det = lu.determinant();
    if (std::abs(det) < opts.jacobian_threshold) {
        throw SingularJacobian("solve_on_shell: Jacobian singular at the solution (|det| = " +
                               std::to_string(std::abs(det)) + ")");
    }
    if (r.norm() > 0.0) {
        Eigen::Matrix<double, 5, 1> step = lu.solve(r);
        StencilConfiguration trial = c;
        for (int v = 0; v < kResidualCount; ++v) {
            GridRef ref = s.solve_for()[static_cast<std::size_t>(v)];
            trial.set(ref, c.get(ref) - step(v));
        }
        try {
            auto rt = residuals(s, trial);
            double before = r.cwiseAbs().maxCoeff();
            double after = 0.0;
            for (double v : rt) after = std::max(after, std::abs(v));
            if (after < before) c = std::move(trial);
        } catch (const dsl::EvalError&) {
        }
    }

    if (auto cell = lattice_cell_jacobian(c); cell && std::abs(*cell) < opts.jacobian_threshold) {
        throw SingularJacobian("solve_on_shell: degenerate lattice cell (area " + std::to_string(*cell) + ")");
    }
    return c;
}

}  // namespace

}  // namespace latsym::lattice
