#pragma once

#include "latsym/lattice/grid.hpp"
#include "latsym/lattice/scheme.hpp"
#include "latsym/symmetry/field.hpp"

namespace latsym::flow {

using symmetry::FieldFunction;
using symmetry::Point;

struct FlowOptions {
    double lambda = 0.0;
    int substeps = 1000;
    bool richardson = true;  // also integrate with half the substeps for an error estimate
    double blowup = 1e12;
};

struct FlowPoint {
    Point value;
    double error_estimate = 0.0;
};

/// Integrates dx/dl = xi, dt/dl = tau, du/dl = phi from `p` over [0, lambda]
/// with fixed-step classical Runge-Kutta.
FlowPoint integrate_flow(const FieldFunction& v, const Point& p, const FlowOptions& opts);
FlowPoint integrate_flow(const symmetry::VectorField& v, const Point& p, const FlowOptions& opts);

struct TransformResult {
    lattice::GridSolution grid;
    lattice::ResidualVector max_residuals{};
    double max_residual = 0.0;
    double max_error_estimate = 0.0;
};

/// Moves every site of `g` along the flow and re-checks the scheme.
TransformResult transform_and_verify(const FieldFunction& v, const lattice::GridSolution& g, const lattice::Scheme& s,
                                     const FlowOptions& opts);
TransformResult transform_and_verify(const symmetry::VectorField& v, const lattice::GridSolution& g,
                                     const lattice::Scheme& s, const FlowOptions& opts);

}  // namespace latsym::flow
