#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "latsym/dsl/expression.hpp"

namespace latsym::symmetry {

struct Monomial {
    int a = 0;  // power of x
    int b = 0;  // power of t
    int c = 0;  // power of u
    auto operator<=>(const Monomial&) const = default;
};

/// Ordered scalar functions of (x, t, u): monomials x^a t^b u^c within the
/// degree limits in graded lexicographic order, then registered functions.
class AnsatzBasis {
public:
    AnsatzBasis(int deg_x, int deg_t, int deg_u, std::vector<std::string> registered = {},
                const std::map<std::string, double>& params = {}, bool light_cone = false);

    std::size_t size() const { return names_.size(); }
    std::size_t monomial_count() const { return monomials_.size(); }
    int deg_x() const { return deg_x_; }
    int deg_t() const { return deg_t_; }
    int deg_u() const { return deg_u_; }
    bool light_cone() const { return light_cone_; }

    const std::string& name(std::size_t k) const { return names_[k]; }
    bool is_monomial(std::size_t k) const { return k < monomials_.size(); }
    const Monomial& monomial(std::size_t k) const { return monomials_[k]; }
    /// Index of a monomial, or -1 when it is outside the basis.
    int index_of(const Monomial& m) const;
    bool depends_on_u(std::size_t k) const { return depends_u_[k]; }
    const std::vector<std::string>& registered_text() const { return registered_text_; }

    /// Values of every basis function at (x, t, u).
    void values(double x, double t, double u, std::span<double> out) const;
    /// Value of basis function k alone.
    double value(std::size_t k, double x, double t, double u) const;
    /// Values plus gradients; grad is size() x 3, row-major.
    void values_and_gradients(double x, double t, double u, std::span<double> out, std::span<double> grad) const;

    /// Smallest over largest singular value of the column-normalized probe
    /// matrix on 5 x size() random points.
    double probe_conditioning() const;

    std::string description() const;

    bool operator==(const AnsatzBasis& o) const {
        return names_ == o.names_ && registered_text_ == o.registered_text_;
    }

private:
    int deg_x_, deg_t_, deg_u_;
    bool light_cone_;
    std::vector<Monomial> monomials_;
    std::vector<dsl::Expression> registered_;
    std::vector<std::string> registered_text_;
    std::vector<std::string> names_;
    std::vector<bool> depends_u_;
};

/// Deterministic probe points (x, t, u) used for fitting and span checks.
std::vector<std::array<double, 3>> probe_points(std::size_t count, unsigned seed = 20240917u);

}  // namespace latsym::symmetry
