#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "latsym/lattice/scheme.hpp"

namespace latsym::lattice {

struct IndexWindow {
    int m_lo = 0;
    int m_hi = 0;
    int n_lo = 0;
    int n_hi = 0;
    int width() const { return m_hi - m_lo + 1; }
    int height() const { return n_hi - n_lo + 1; }
    bool contains(int m, int n) const { return m >= m_lo && m <= m_hi && n >= n_lo && n <= n_hi; }
};

/// (x, t, u) over a rectangular window of lattice indices.
class GridSolution {
public:
    GridSolution() = default;
    explicit GridSolution(IndexWindow w);

    const IndexWindow& window() const { return window_; }
    std::array<double, 3>& at(int m, int n);
    const std::array<double, 3>& at(int m, int n) const;

    double on_shell_tolerance = 0.0;

private:
    std::size_t index(int m, int n) const;

    IndexWindow window_;
    std::vector<std::array<double, 3>> values_;
};

/// Sparse site values keyed by (m, n); NaN marks an unknown component.
using SiteMap = std::map<std::pair<int, int>, std::array<double, 3>>;

/// Seed sites for `window` following the scheme's recipe (or `recipe`).
SiteMap make_seed(const Scheme& s, const SeedRecipe& recipe, const IndexWindow& window);
SiteMap make_seed(const Scheme& s, const IndexWindow& window);

/// Fill `window` by repeated solve_on_shell sweeps, n-major, from the seed.
/// Seed sites may extend beyond the window; the result is cropped to it.
GridSolution propagate_grid(const Scheme& s, const SiteMap& seed, const IndexWindow& window);

/// Configuration of the stencil placed with reference point (m, n); false if
/// any stencil point falls outside the grid window.
bool placement(const Scheme& s, const GridSolution& g, int m, int n, StencilConfiguration& out);

/// Largest |E_a| over every placement lying wholly inside the window.
ResidualVector max_residuals(const Scheme& s, const GridSolution& g);

/// CSV with header `m,n,x,t,u`.
void write_csv(std::ostream& os, const GridSolution& g);
GridSolution read_csv(std::istream& is);

}  // namespace latsym::lattice
