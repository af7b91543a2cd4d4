#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "latsym/lattice/sampling.hpp"
#include "latsym/lattice/scheme.hpp"
#include "latsym/symmetry/field.hpp"

namespace latsym::finder {

using lattice::Scheme;
using symmetry::AnsatzBasis;
using symmetry::VectorField;

enum class Sector { Finite, Superposition };
const char* sector_name(Sector s);

/// Closed-form field used to pick readable representatives of the nullspace.
struct OracleField {
    std::string name;
    std::string xi;
    std::string tau;
    std::string phi;
};

struct FinderOptions {
    int samples = 0;  // 0 selects max(3 * coefficients, 100)
    std::uint64_t seed = 1;
    lattice::SamplingOptions sampling;  // its seed is replaced by `seed`
    double cutoff = 1e-8;               // relative singular value cutoff
    bool u_dependent_lattice = false;   // let xi and tau depend on u
    double sector_tolerance = 1e-10;
    std::vector<OracleField> oracle;
    std::map<std::string, double> oracle_params;
};

struct SymmetryBasis {
    std::string scheme;
    std::shared_ptr<const AnsatzBasis> basis;
    bool u_dependent_lattice = false;
    std::vector<VectorField> fields;
    std::vector<std::string> names;
    std::vector<Sector> sectors;
    std::vector<double> singular_values;  // descending, of the equilibrated constraint matrix
    int samples = 0;
    int rows = 0;
    int coefficients = 0;
    int rank = 0;
    // largest ||M c|| / (||M|| ||c||) over the returned fields, unequilibrated M
    double annihilation = 0.0;

    std::size_t size() const { return fields.size(); }
    std::vector<VectorField> in_sector(Sector s) const;
    int dimension(Sector s) const;
};

/// Number of unknown coefficients: u-free basis functions for xi and tau
/// (unless u-dependence is enabled), all basis functions for phi.
int coefficient_count(const AnsatzBasis& b, bool u_dependent_lattice);

/// Constraint matrix over the free coefficients: five rows per configuration.
Eigen::MatrixXd constraint_matrix(const Scheme& s, const AnsatzBasis& b, bool u_dependent_lattice,
                                  const std::vector<lattice::StencilConfiguration>& configs);

SymmetryBasis find_symmetries(const Scheme& s, std::shared_ptr<const AnsatzBasis> basis, const FinderOptions& opts);

struct SectorSplit {
    std::vector<VectorField> finite;
    std::vector<VectorField> superposition;
};

/// Superposition part: the largest subspace with xi = tau = 0 and phi free of
/// u; finite part: its orthogonal complement in coefficient space.
SectorSplit split_sectors(const std::vector<VectorField>& fields, double tol = 1e-10);
SectorSplit split_sectors(const SymmetryBasis& b);

struct StructureConstants {
    // c[i][j][k]: [X_i, X_j] = sum_k c[i][j][k] X_k
    std::vector<std::vector<std::vector<double>>> c;
    // largest ||[X_i, X_j] - projection|| / (||X_i|| ||X_j||)
    double closure_residual = 0.0;
    bool closed(double tol = 1e-8) const { return closure_residual <= tol; }
};

StructureConstants structure_constants(const std::vector<VectorField>& fields);

/// Largest |pr X E_a| of each field over `count` fresh on-shell draws.
std::vector<double> verify_fields(const Scheme& s, const std::vector<VectorField>& fields,
                                  lattice::SamplingOptions sampling, int count);

/// Largest principal angle (radians) between two spans in coefficient space.
double max_principal_angle(const std::vector<VectorField>& a, const std::vector<VectorField>& b);

/// Coefficients of `v` over the span of `fields` plus the relative residual.
std::pair<Eigen::VectorXd, double> project(const VectorField& v, const std::vector<VectorField>& fields);

}  // namespace latsym::finder
