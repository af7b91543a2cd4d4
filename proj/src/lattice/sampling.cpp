#include "latsym/lattice/sampling.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <set>

#include "latsym/errors.hpp"

namespace latsym::lattice {

namespace {

GridRef shifted(GridRef r, Offset o) { return {r.var, {r.at.i + o.i, r.at.j + o.j}}; }

}  // namespace

std::vector<Closure> closure_constraints(const Scheme& s) {
    std::vector<Closure> out;
    const auto& b = s.bounds();
    const int di = b.i1 + b.i2;
    const int dj = b.j1 + b.j2;
    for (int sj = -dj; sj <= dj; ++sj) {
        for (int si = -di; si <= di; ++si) {
            if (si == 0 && sj == 0) continue;
            for (int a = 0; a < kResidualCount; ++a) {
                const auto& refs = s.residual(a).refs();
                if (refs.empty()) continue;
                bool inside = std::all_of(refs.begin(), refs.end(), [&](const GridRef& r) {
                    return std::binary_search(s.points().begin(), s.points().end(), shifted(r, {si, sj}).at);
                });
                if (inside) out.push_back({a, {si, sj}});
            }
        }
    }
    return out;
}

double closure_value(const Scheme& s, const Closure& k, const StencilConfiguration& c, std::vector<double>* gradient) {
    const auto& e = s.residual(k.residual);
    std::vector<double> vals;
    vals.reserve(e.refs().size());
    for (const auto& r : e.refs()) vals.push_back(c.get(shifted(r, k.shift)));
    if (!gradient) return e.evaluate<double>(vals, s.residual_params(k.residual));
    gradient->assign(vals.size(), 0.0);
    return e.value_and_gradient(vals, s.residual_params(k.residual), *gradient);
}

OnShellSampler::OnShellSampler(const Scheme& s, SamplingOptions opts)
    : scheme_(&s), opts_(std::move(opts)), rng_(opts_.seed), closures_(closure_constraints(s)) {
    std::set<GridRef> active(s.active_refs().begin(), s.active_refs().end());
    for (Offset p : s.points()) {
        for (Var v : {Var::X, Var::T, Var::U}) {
            GridRef r{v, p};
            if (!active.contains(r)) {
                passive_.push_back(r);
            } else if (!s.is_solve_for(r)) {
                free_.push_back(r);
            }
        }
    }
    for (std::size_t k = 0; k < closures_.size(); ++k) {
        bool touches_unknown = false;
        for (const auto& r : s.residual(closures_[k].residual).refs()) {
            touches_unknown = touches_unknown || s.is_solve_for(shifted(r, closures_[k].shift));
        }
        if (!touches_unknown) free_closures_.push_back(static_cast<int>(k));
        all_closures_.push_back(static_cast<int>(k));
    }
}

// Weighted minimum-norm Gauss-Newton on the selected closures. `weights` are
// per-variable step scales over free_ followed by passive_; zero freezes.
bool OnShellSampler::relax(StencilConfiguration& c, const std::vector<int>& closures,
                           const std::vector<double>& weights) {
    if (closures.empty()) return true;
    std::vector<GridRef> vars = free_;
    vars.insert(vars.end(), passive_.begin(), passive_.end());
    std::map<GridRef, int> column;
    for (std::size_t k = 0; k < vars.size(); ++k) column[vars[k]] = static_cast<int>(k);

    const Eigen::Index nc = static_cast<Eigen::Index>(closures.size());
    const Eigen::Index nv = static_cast<Eigen::Index>(vars.size());
    std::vector<double> grad;
    for (int it = 0; it < 30; ++it) {
        Eigen::VectorXd g(nc);
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nc, nv);
        double worst = 0.0;
        for (Eigen::Index row = 0; row < nc; ++row) {
            const Closure& k = closures_[static_cast<std::size_t>(closures[static_cast<std::size_t>(row)])];
            g(row) = closure_value(*scheme_, k, c, &grad);
            const auto& refs = scheme_->residual(k.residual).refs();
            double scale = 1.0;
            for (std::size_t q = 0; q < refs.size(); ++q) {
                GridRef r = shifted(refs[q], k.shift);
                scale += std::abs(grad[q]) * std::abs(c.get(r));
                auto col = column.find(r);
                if (col != column.end()) J(row, col->second) += grad[q] * weights[static_cast<std::size_t>(col->second)];
            }
            worst = std::max(worst, std::abs(g(row)) / scale);
        }
        if (!g.allFinite()) return false;
        if (worst <= 1e-15) return true;
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(J);
        Eigen::VectorXd step = cod.solve(g);
        for (Eigen::Index q = 0; q < nv; ++q) {
            GridRef r = vars[static_cast<std::size_t>(q)];
            c.set(r, c.get(r) - weights[static_cast<std::size_t>(q)] * step(q));
        }
    }
    return true;  // the final verification decides
}

std::array<double, kResidualCount> OnShellSampler::initial_guess(const StencilConfiguration& c) const {
    std::array<double, kResidualCount> guess{};
    for (int v = 0; v < kResidualCount; ++v) {
        GridRef r = scheme_->solve_for()[static_cast<std::size_t>(v)];
        double base = 0.0;
        if (c.is_bound({r.var, {0, 0}})) base = c.get({r.var, {0, 0}});
        if (r.var == Var::X) base += r.at.i;
        if (r.var == Var::T) base += r.at.j;
        guess[static_cast<std::size_t>(v)] = base;
    }
    return guess;
}

bool OnShellSampler::acceptable(const StencilConfiguration& c) const {
    for (std::size_t k = 0; k < c.size(); ++k) {
        for (double v : c.point(k)) {
            if (!std::isfinite(v) || std::abs(v) > opts_.max_magnitude) return false;
        }
    }
    if (c.index_of({1, 0}) >= 0 && c.index_of({0, 0}) >= 0) {
        if (std::abs(c.get({Var::X, {1, 0}}) - c.get({Var::X, {0, 0}})) < opts_.min_spacing) return false;
    }
    if (auto cell = lattice_cell_jacobian(c); cell && std::abs(*cell) < opts_.min_cell) return false;

    auto r = residuals(*scheme_, c);
    auto scales = residual_scales(*scheme_, c);
    for (int a = 0; a < kResidualCount; ++a) {
        if (!(std::abs(r[static_cast<std::size_t>(a)]) <= 1e-11 * scales[static_cast<std::size_t>(a)])) return false;
    }
    std::vector<double> grad;
    for (const auto& k : closures_) {
        double g = closure_value(*scheme_, k, c, &grad);
        const auto& refs = scheme_->residual(k.residual).refs();
        double scale = 1.0;
        for (std::size_t q = 0; q < refs.size(); ++q) scale += std::abs(grad[q]) * std::abs(c.get(shifted(refs[q], k.shift)));
        if (!(std::abs(g) <= opts_.closure_tolerance * scale)) return false;
    }
    if (opts_.admissible && !opts_.admissible(c)) return false;
    return true;
}

std::optional<StencilConfiguration> OnShellSampler::try_draw() {
    ++attempts_;
    const auto& s = *scheme_;
    StencilConfiguration c = s.make_configuration();
    auto uniform = [&](Var v) {
        const auto& [lo, hi] = opts_.ranges[static_cast<std::size_t>(v)];
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    };
    for (const auto& r : free_) c.set(r, uniform(r.var));
    for (const auto& r : passive_) c.set(r, uniform(r.var));

    try {
        std::vector<double> w(free_.size() + passive_.size(), 1.0);
        for (std::size_t k = 0; k < free_.size(); ++k) w[k] = 1e-2;
        if (!relax(c, free_closures_, w)) return std::nullopt;

        auto unknown_data = c;
        for (const auto& r : s.solve_for()) unknown_data.set(r, std::numeric_limits<double>::quiet_NaN());
        c = solve_on_shell(s, unknown_data, initial_guess(c));

        for (std::size_t k = 0; k < free_.size(); ++k) w[k] = 0.0;
        if (!relax(c, all_closures_, w)) return std::nullopt;
        if (!acceptable(c)) return std::nullopt;
    } catch (const NumericalError&) {
        return std::nullopt;
    } catch (const dsl::EvalError&) {
        return std::nullopt;
    }
    ++accepted_;
    return c;
}

std::vector<StencilConfiguration> OnShellSampler::draw(int count) {
    std::vector<StencilConfiguration> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    const int budget = 2 * count + 20;
    int tries = 0;
    while (static_cast<int>(out.size()) < count) {
        if (tries++ >= budget) {
            throw NumericalError("sampling of on-shell configurations for '" + scheme_->name() + "' failed: " +
                                 std::to_string(out.size()) + " accepted out of " + std::to_string(tries - 1) +
                                 " attempts (failure rate above 50%; ranges too tight?)");
        }
        if (auto c = try_draw()) out.push_back(std::move(*c));
    }
    return out;
}

}  // namespace latsym::lattice
