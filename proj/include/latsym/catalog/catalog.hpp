#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "latsym/lattice/grid.hpp"
#include "latsym/lattice/sampling.hpp"
#include "latsym/lattice/scheme.hpp"

namespace latsym::catalog {

using lattice::IndexWindow;
using lattice::Offset;
using lattice::SamplingOptions;
using lattice::Scheme;

class UnknownScheme : public std::invalid_argument {
public:
    explicit UnknownScheme(const std::string& id);
};

class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Declared parameter: default value plus admissible interval and excluded points.
struct ParamSpec {
    std::string name;
    double value = 0.0;
    double lo = -1e300;
    double hi = 1e300;
    std::vector<double> excluded;
    std::string note;
};

/// Closed-form vector field, components in DSL text over x, t (or y), u and
/// the scheme parameters.
struct FieldSpec {
    std::string name;
    std::string xi;
    std::string tau;
    std::string phi;
};

/// How the lattice shrinks towards the continuum: scheme parameters as
/// functions of the scale eps, and the position of stencil point (i, j) for
/// a reference point at (x, t).
struct ContinuumSpec {
    std::function<std::map<std::string, double>(double eps)> scaled_params;
    std::function<std::array<double, 2>(double x, double t, Offset o, double eps)> position;
    std::vector<std::string> dictionary;
    std::map<std::string, double> expected;
    std::string probe;  // empty: library default
};

struct CatalogEntry {
    std::string id;
    std::string label;        // id plus distinguishing parameters, e.g. lorentz[f=exp]
    Scheme scheme;
    std::vector<ParamSpec> params;
    std::string interaction;  // lorentz only
    std::vector<FieldSpec> finite_oracle;
    std::vector<FieldSpec> superposition_oracle;
    std::vector<FieldSpec> excluded;  // fields known not to be symmetries
    std::vector<std::string> extra_basis;  // registered basis functions, DSL text
    int expected_finite = -1;
    int expected_superposition = -1;
    SamplingOptions sampling;
    IndexWindow window{0, 19, 0, 19};
    std::optional<ContinuumSpec> continuum;

    std::vector<FieldSpec> oracle() const;
    int expected_dimension() const;
};

/// Known scheme ids in listing order.
const std::vector<std::string>& scheme_ids();

/// Resolve an entry; `params` may override any declared parameter, and for
/// lorentz select the interaction with f=power|exp|linear|constant.
CatalogEntry instantiate(const std::string& id, const std::map<std::string, std::string>& params = {});
CatalogEntry instantiate(const std::string& id, const std::map<std::string, double>& params);

/// The eleven reference parameterizations (five heat lattices, four Lorentz
/// interactions, two Burgers equations).
std::vector<CatalogEntry> reference_runs();

/// One line per id with its parameter signature.
std::string list_text();

/// Galilei lattice with integration constant sigma: coordinate lines
/// orthogonal, and the n-lines parallel to the x axis.
bool galilei_orthogonal(const CatalogEntry& e, double sigma, double tol = 1e-12);
bool galilei_aligned(const CatalogEntry& e, double sigma, double tol = 1e-12);

}  // namespace latsym::catalog
