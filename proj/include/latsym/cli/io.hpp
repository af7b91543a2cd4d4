#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "latsym/lattice/grid.hpp"

namespace latsym::cli {

/// One field per line as `[name:] xi = ...; tau = ...; phi = ...`; blank
/// lines and lines starting with # are skipped. Unnamed fields get X1, X2, ...
struct NamedField {
    std::string name;
    std::string text;
};

std::vector<NamedField> read_fields(std::istream& is);
std::vector<NamedField> read_field_file(const std::string& path);
void write_fields(std::ostream& os, const std::vector<NamedField>& fields);

/// Scatter of lattice points (x horizontal, t vertical) with axes. Each point
/// carries its indices and exact coordinates as data attributes so the file
/// can be read back.
struct SvgSeries {
    std::string name;
    lattice::GridSolution grid;
};

struct SvgPoint {
    std::string series;
    int m = 0;
    int n = 0;
    double x = 0.0;
    double t = 0.0;
};

void write_svg(std::ostream& os, const std::vector<SvgSeries>& series, const std::string& title = "");
std::vector<SvgPoint> read_svg(std::istream& is);

}  // namespace latsym::cli
