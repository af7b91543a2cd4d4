#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "latsym/lattice/grid.hpp"
#include "latsym/lattice/scheme.hpp"

namespace latsym::lattice {

/// A custom scheme read from a JSON document:
///
///   {
///     "name": "my_heat",
///     "stencil": {"i1": 1, "i2": 1, "j1": 0, "j2": 1},
///     "residuals": ["x[1,0]-x-h1", "...", "...", "...", "..."],
///     "params": {"h1": 1.0},
///     "solve_for": ["x[1,0]", "t[1,0]", "x[0,1]", "t[0,1]", "u[0,1]"],   optional
///     "light_cone": false,                                               optional
///     "seed": {"rows": 1, "columns": 0, "x": "h1*m", "t": "h2*n", "u": "sin(x)"},  optional
///     "window": {"m": [0, 19], "n": [0, 19]}                             optional
///   }
struct SchemeFile {
    Scheme scheme;
    std::optional<IndexWindow> window;
};

class SchemeFileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

SchemeFile read_scheme(std::istream& is);
SchemeFile read_scheme_file(const std::string& path);
void write_scheme(std::ostream& os, const Scheme& s, const std::optional<IndexWindow>& window = std::nullopt);

}  // namespace latsym::lattice
