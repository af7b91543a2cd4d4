#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "latsym/lattice/scheme.hpp"

namespace latsym::lattice {

using Admissibility = std::function<bool(const StencilConfiguration&)>;

struct SamplingOptions {
    // ranges for x, t (or y), u
    std::array<std::pair<double, double>, 3> ranges{{{-5.0, 5.0}, {-5.0, 5.0}, {-2.0, 2.0}}};
    std::uint64_t seed = 1;
    double min_spacing = 0.1;     // |x[1,0] - x[0,0]|
    double min_cell = 1e-6;       // |lattice cell Jacobian|
    double closure_tolerance = 1e-10;
    double max_magnitude = 1e6;
    Admissibility admissible;
};

/// A residual of the scheme evaluated at a shifted placement whose points all
/// lie in the stencil. These tie together values that neighbouring placements
/// of the scheme would relate on an actual lattice solution.
struct Closure {
    int residual = 0;
    Offset shift;
};

std::vector<Closure> closure_constraints(const Scheme& s);

/// Value (and gradient over residual(a).refs(), shifted) of a closure.
double closure_value(const Scheme& s, const Closure& k, const StencilConfiguration& c,
                     std::vector<double>* gradient = nullptr);

/// Draws random on-shell stencil configurations.
///
/// Active values that are not solved for are drawn uniformly, values the
/// residuals never touch are placed so that every closure holds, then the
/// five unknowns are found with solve_on_shell. Degenerate or inadmissible
/// draws are rejected.
class OnShellSampler {
public:
    OnShellSampler(const Scheme& s, SamplingOptions opts);

    std::optional<StencilConfiguration> try_draw();

    /// `count` accepted configurations; throws NumericalError when more than
    /// half of the attempts are rejected.
    std::vector<StencilConfiguration> draw(int count);

    int attempts() const { return attempts_; }
    int accepted() const { return accepted_; }

private:
    bool relax(StencilConfiguration& c, const std::vector<int>& closures, const std::vector<double>& weights);
    std::array<double, kResidualCount> initial_guess(const StencilConfiguration& c) const;
    bool acceptable(const StencilConfiguration& c) const;

    const Scheme* scheme_;
    SamplingOptions opts_;
    std::mt19937_64 rng_;
    std::vector<Closure> closures_;
    std::vector<int> free_closures_;  // closures not touching the unknowns
    std::vector<int> all_closures_;
    std::vector<GridRef> free_;
    std::vector<GridRef> passive_;
    int attempts_ = 0;
    int accepted_ = 0;
};

}  // namespace latsym::lattice
