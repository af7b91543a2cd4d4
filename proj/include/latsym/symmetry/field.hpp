#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <map>
#include <memory>
#include <string>

#include "latsym/dsl/expression.hpp"
#include "latsym/symmetry/ansatz.hpp"

namespace latsym::symmetry {

using Point = std::array<double, 3>;
using FieldFunction = std::function<Point(double x, double t, double u)>;

/// X = xi d/dx + tau d/dt + phi d/du with coefficients over an ansatz basis.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(std::shared_ptr<const AnsatzBasis> basis);
    VectorField(std::shared_ptr<const AnsatzBasis> basis, Eigen::VectorXd xi, Eigen::VectorXd tau,
                Eigen::VectorXd phi);
    /// From the stacked coefficient vector (xi, tau, phi).
    static VectorField from_stacked(std::shared_ptr<const AnsatzBasis> basis, const Eigen::VectorXd& c);

    /// Parse `xi = ...; tau = ...; phi = ...` (tau may be spelled eta) and
    /// fit each component onto the basis; throws SpanEscape when a component
    /// is not representable.
    static VectorField from_text(const std::string& text, std::shared_ptr<const AnsatzBasis> basis,
                                 const std::map<std::string, double>& params = {});
    static VectorField from_components(const std::string& xi, const std::string& tau, const std::string& phi,
                                       std::shared_ptr<const AnsatzBasis> basis,
                                       const std::map<std::string, double>& params = {});

    const AnsatzBasis& basis() const { return *basis_; }
    const std::shared_ptr<const AnsatzBasis>& basis_ptr() const { return basis_; }

    const Eigen::VectorXd& xi() const { return c_[0]; }
    const Eigen::VectorXd& tau() const { return c_[1]; }
    const Eigen::VectorXd& phi() const { return c_[2]; }
    const Eigen::VectorXd& component(int k) const { return c_[static_cast<std::size_t>(k)]; }
    Eigen::VectorXd stacked() const;

    Point operator()(double x, double t, double u) const;
    FieldFunction function() const;

    /// DSL text triple; coefficients below rel_tol times the largest are dropped.
    std::string to_text(double rel_tol = 1e-10) const;
    std::string component_text(int k, double rel_tol = 1e-10) const;

    VectorField operator+(const VectorField& o) const;
    VectorField operator-(const VectorField& o) const;
    VectorField operator*(double s) const;

private:
    void check_compatible(const VectorField& o) const;

    std::shared_ptr<const AnsatzBasis> basis_;
    std::array<Eigen::VectorXd, 3> c_;
    // nonzero coefficient positions per component, for sparse evaluation
    std::array<std::vector<int>, 3> nz_;
    void index_nonzeros();
};

Point evaluate_field(const VectorField& v, const Point& p);

/// A field given directly by three DSL expressions in x, t (or y), u.
class ExpressionField {
public:
    ExpressionField(const std::string& xi, const std::string& tau, const std::string& phi,
                    const std::map<std::string, double>& params = {});
    static ExpressionField from_text(const std::string& text, const std::map<std::string, double>& params = {});

    Point operator()(double x, double t, double u) const;
    FieldFunction function() const;
    std::string to_text() const;

private:
    std::array<dsl::Expression, 3> e_;
};

/// Split `xi = ...; tau = ...; phi = ...` into its three component texts.
std::array<std::string, 3> split_field_text(const std::string& text);

}  // namespace latsym::symmetry
