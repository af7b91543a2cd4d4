#pragma once

#include <Eigen/Core>

#include "latsym/lattice/scheme.hpp"
#include "latsym/symmetry/field.hpp"

namespace latsym::symmetry {

using lattice::ResidualVector;
using lattice::Scheme;
using lattice::StencilConfiguration;

/// pr X E_a: sum over stencil points P of xi(P) dE_a/dx_P + tau(P) dE_a/dt_P
/// + phi(P) dE_a/du_P, the field evaluated at each point's own (x, t, u).
ResidualVector prolonged_action(const FieldFunction& v, const Scheme& s, const StencilConfiguration& c);
ResidualVector prolonged_action(const VectorField& v, const Scheme& s, const StencilConfiguration& c);
ResidualVector prolonged_action(const ExpressionField& v, const Scheme& s, const StencilConfiguration& c);

/// Five rows (one per residual) of pr X E_a for every unit coefficient field
/// of `basis`, columns stacked as (xi, tau, phi) blocks.
Eigen::MatrixXd invariance_rows(const AnsatzBasis& basis, const Scheme& s, const StencilConfiguration& c);

}  // namespace latsym::symmetry
