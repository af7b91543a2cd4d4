#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "latsym/dsl/expression.hpp"

namespace latsym::lattice {

using dsl::Expression;
using dsl::GridRef;
using dsl::Offset;
using dsl::Var;

inline constexpr int kResidualCount = 5;

/// Stencil extent around the reference point: -i1 <= i <= i2, -j1 <= j <= j2.
struct StencilBounds {
    int i1 = 0;
    int i2 = 0;
    int j1 = 0;
    int j2 = 0;
    bool contains(Offset o) const { return o.i >= -i1 && o.i <= i2 && o.j >= -j1 && o.j <= j2; }
};

/// How a grid is seeded before propagation. Rows n_lo-rows+1..n_lo are filled
/// over a widened m-range; when `columns > 0`, columns m_lo-columns+1..m_lo are
/// filled for every n as well (characteristic data for light-cone schemes).
/// `x` and `t` are closed-form lattice coordinates in the identifiers m, n and
/// the scheme parameters; `u` is the initial profile in bare x, t.
struct SeedRecipe {
    int rows = 1;
    int columns = 0;
    Expression x;
    Expression t;
    Expression u;
};

/// Concrete (x, t, u) values at every point of a scheme's stencil.
/// Entries may be NaN while a configuration is only partially bound.
class StencilConfiguration {
public:
    StencilConfiguration() = default;
    explicit StencilConfiguration(std::vector<Offset> points);

    const std::vector<Offset>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }

    /// Index of a stencil point, or -1.
    int index_of(Offset o) const;

    double get(GridRef r) const;
    void set(GridRef r, double v);
    bool is_bound(GridRef r) const;

    std::array<double, 3>& point(std::size_t k) { return values_[k]; }
    const std::array<double, 3>& point(std::size_t k) const { return values_[k]; }

private:
    std::vector<Offset> points_;
    std::vector<std::array<double, 3>> values_;
};

/// A five-equation difference scheme on a transforming lattice.
///
/// Four residuals fix the lattice and one approximates the PDE. Parameters
/// hold the scheme constants plus any integration constants the seed recipe
/// uses.
class Scheme {
public:
    Scheme() = default;
    Scheme(std::string name, StencilBounds bounds, std::array<Expression, kResidualCount> residuals,
           std::map<std::string, double> params, std::array<GridRef, kResidualCount> solve_for,
           bool light_cone = false, std::optional<SeedRecipe> seed = std::nullopt);

    const std::string& name() const { return name_; }
    const StencilBounds& bounds() const { return bounds_; }
    const Expression& residual(int a) const { return residuals_[static_cast<std::size_t>(a)]; }
    const std::array<Expression, kResidualCount>& residuals() const { return residuals_; }
    const std::map<std::string, double>& params() const { return params_; }
    const std::array<GridRef, kResidualCount>& solve_for() const { return solve_for_; }
    bool light_cone() const { return light_cone_; }
    const std::optional<SeedRecipe>& seed() const { return seed_; }

    /// Stencil points referenced by any residual, sorted.
    const std::vector<Offset>& points() const { return points_; }
    /// Grid references appearing in some residual, sorted.
    const std::vector<GridRef>& active_refs() const { return active_; }

    bool is_solve_for(GridRef r) const;

    /// Copy with some parameters overridden (names must already exist).
    Scheme with_params(const std::map<std::string, double>& overrides) const;

    StencilConfiguration make_configuration() const { return StencilConfiguration(points_); }

    /// Residual a and its gradient over residual(a).refs() at configuration c.
    double residual_gradient(int a, const StencilConfiguration& c, std::vector<double>& gradient) const;
    double residual_value(int a, const StencilConfiguration& c) const;

    /// Parameter values aligned with residual(a).parameters().
    const std::vector<double>& residual_params(int a) const { return residual_params_[static_cast<std::size_t>(a)]; }

private:
    void compile();

    std::string name_;
    StencilBounds bounds_;
    std::array<Expression, kResidualCount> residuals_;
    std::map<std::string, double> params_;
    std::array<GridRef, kResidualCount> solve_for_;
    bool light_cone_ = false;
    std::optional<SeedRecipe> seed_;

    std::vector<Offset> points_;
    std::vector<GridRef> active_;
    std::array<std::vector<double>, kResidualCount> residual_params_;
    // residual a, slot k -> (stencil point index, variable index)
    std::array<std::vector<std::pair<int, int>>, kResidualCount> slots_;
};

/// Default solve-for unknowns x[i2,0], t[i2,0], x[0,j2], t[0,j2], u[i2,j2].
std::array<GridRef, kResidualCount> default_solve_for(const StencilBounds& b);

using ResidualVector = std::array<double, kResidualCount>;

ResidualVector residuals(const Scheme& s, const StencilConfiguration& c);

/// Determinant of d(E_1..E_5)/d(solve-for unknowns).
double jacobian_nondegeneracy(const Scheme& s, const StencilConfiguration& c);

/// Signed area of the lattice cell spanned by P(1,0) - P(0,0) and
/// P(0,1) - P(0,0); empty when the stencil lacks either neighbour.
std::optional<double> lattice_cell_jacobian(const StencilConfiguration& c);

struct SolveOptions {
    double tolerance = 1e-12;           // relative on-shell tolerance
    double jacobian_threshold = 1e-8;   // |det| below this is singular
    int max_iterations = 50;
    int max_halvings = 20;
};

/// Damped Newton solve for the five solve-for unknowns. `free_data` must bind
/// every active reference except the unknowns; `guess` seeds the iteration.
StencilConfiguration solve_on_shell(const Scheme& s, const StencilConfiguration& free_data,
                                    const std::array<double, kResidualCount>& guess,
                                    const SolveOptions& opts = {});

/// Per-residual bound used for on-shell checks: tol * (1 + sum |dE/dv| |v|).
ResidualVector residual_scales(const Scheme& s, const StencilConfiguration& c);

}  // namespace latsym::lattice
