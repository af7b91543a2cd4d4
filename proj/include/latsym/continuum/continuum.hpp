#pragma once

#include <map>
#include <string>
#include <vector>

#include "latsym/catalog/catalog.hpp"

namespace latsym::continuum {

/// Value and derivatives of a smooth function of (x, t) at one point.
struct Jet {
    double u = 0, u_x = 0, u_t = 0, u_xx = 0, u_xt = 0, u_tt = 0;
};

/// Smooth test function given as DSL text over x and t (y is accepted as t).
class TestFunction {
public:
    explicit TestFunction(const std::string& text, const std::map<std::string, double>& params = {});
    Jet jet(double x, double t) const;
    double operator()(double x, double t) const;
    const std::string& text() const { return text_; }

private:
    std::string text_;
    dsl::Expression expr_;
    std::vector<double> params_;
    int x_slot_ = -1;
    int t_slot_ = -1;
};

/// Dictionary terms understood by the fit: u_t, u_x, u_xx, u_xt, u_tt, u, 1,
/// u_x^2, u*u_x, u^p (scheme parameter p) and exp(u).
double dictionary_term(const std::string& name, const Jet& j, const std::map<std::string, double>& params);
const std::vector<std::string>& known_terms();

inline constexpr const char* kDefaultProbe = "sin(x)*exp(-t/2) + 0.3*x*t";

struct LimitProbe {
    std::string function;  // empty: the entry's probe, else the library default
    std::vector<double> scales;  // strictly decreasing to 0; empty: 2^-k, k = 3..10
    std::vector<std::string> dictionary;  // empty: the entry's dictionary
    double condition_limit = 1e10;
};

struct LimitFit {
    std::string probe;
    std::vector<std::string> dictionary;
    std::vector<double> scales;
    // coefficients fitted at each scale, normalized so the first dictionary term is 1
    std::vector<std::vector<double>> per_scale;
    std::map<std::string, double> coefficients;  // extrapolated to eps -> 0
    std::vector<double> max_residual;           // raw max |E_5| per scale
    std::vector<double> remainder;              // relative post-fit remainder per scale
    double order = 0.0;                         // observed order of the remainder
    double condition = 0.0;                     // of the dictionary matrix
    double normalization = 0.0;                 // raw coefficient of the first term at the smallest scale
};

/// Raw max |E_5| of the scheme evaluated on the test function over the
/// scaled lattice, one value per scale. No fit, so degenerate probes are fine.
std::vector<double> scaled_residuals(const catalog::CatalogEntry& e, const LimitProbe& probe);

/// Fits E_5 on the scaled lattice against the dictionary at every scale,
/// extrapolates the coefficients and estimates the remainder order.
/// Throws NumericalError if the dictionary matrix is ill-conditioned or the
/// remainder does not shrink.
LimitFit leading_order_coefficients(const catalog::CatalogEntry& e, const LimitProbe& probe = {});

struct ChangeOfVariablesReport {
    double c = 0.0;
    double max_relative_residual = 0.0;
    double max_u_t = 0.0;
    int points = 0;
};

enum class BetaScaling { Corrected, Printed };

/// Pulls w(alpha, beta) = exp(alpha + k*beta) back through
/// u = exp(c((2+c^2)x + c t) / (4(1+c^2)^2)) w, alpha = x + c t,
/// beta = s(c) (t - c x), and evaluates u_t - u_xx - 2c u_xt - c^2 u_tt on a
/// 10 x 10 sample. s(c) = (1+c^2)^2 (Corrected) or 1+c^2 (Printed); k = 1 is
/// a solution of w_beta = w_alphaalpha, k = 2 is not.
ChangeOfVariablesReport verify_change_of_variables(double c, BetaScaling scaling = BetaScaling::Corrected,
                                                   double k = 1.0);

}  // namespace latsym::continuum
