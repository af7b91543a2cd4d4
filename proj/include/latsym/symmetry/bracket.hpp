#pragma once

#include <memory>

#include "latsym/symmetry/field.hpp"

namespace latsym::symmetry {

struct Bracket {
    VectorField field;
    double residual = 0.0;  // relative re-expansion residual (0 on the symbolic path)
    bool symbolic = true;
};

/// [a, b] with components X_a(b_k) - X_b(a_k), expressed over `out` (default:
/// the inputs' basis). Polynomial fields are bracketed exactly; fields using
/// registered functions are re-expanded by least squares on a probe set.
/// Throws SpanEscape when the bracket leaves the output span.
Bracket lie_bracket_ex(const VectorField& a, const VectorField& b,
                       std::shared_ptr<const AnsatzBasis> out = nullptr);
VectorField lie_bracket(const VectorField& a, const VectorField& b, std::shared_ptr<const AnsatzBasis> out = nullptr);

}  // namespace latsym::symmetry
