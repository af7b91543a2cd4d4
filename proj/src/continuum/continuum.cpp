#include "latsym/continuum/continuum.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "latsym/dsl/dual.hpp"
#include "latsym/errors.hpp"

namespace latsym::continuum {

using dsl::Dual;
using DD = Dual<Dual<double>>;

namespace {

// f evaluated along (x, t) + s (dx, dt): value, first and second s-derivative.
template <class F>
std::array<double, 3> along(const F& f, double x, double t, double dx, double dt) {
    DD X{Dual<double>(x, dx), Dual<double>(dx, 0.0)};
    DD T{Dual<double>(t, dt), Dual<double>(dt, 0.0)};
    DD r = f(X, T);
    return {r.v.v, r.v.d, r.d.d};
}

template <class F>
Jet jet_of(const F& f, double x, double t) {
    const auto ax = along(f, x, t, 1, 0);
    const auto at = along(f, x, t, 0, 1);
    const auto ad = along(f, x, t, 1, 1);
    Jet j;
    j.u = ax[0];
    j.u_x = ax[1];
    j.u_xx = ax[2];
    j.u_t = at[1];
    j.u_tt = at[2];
    j.u_xt = (ad[2] - ax[2] - at[2]) / 2;
    return j;
}

std::vector<double> default_scales() {
    std::vector<double> s;
    for (int k = 3; k <= 10; ++k) s.push_back(std::ldexp(1.0, -k));
    return s;
}

// Reference points where the limit is probed.
std::vector<std::array<double, 2>> sample_points() {
    std::vector<std::array<double, 2>> pts;
    for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 5; ++b) pts.push_back({0.4 + 0.37 * a, 0.3 + 0.29 * b});
    }
    return pts;
}

struct Setup {
    const catalog::ContinuumSpec* spec;
    TestFunction probe;
    std::vector<double> scales;
    std::vector<std::string> dictionary;
};

Setup setup(const catalog::CatalogEntry& e, const LimitProbe& p) {
    if (!e.continuum) throw std::invalid_argument(e.label + " has no continuum scaling");
    const auto& cs = *e.continuum;
    std::string text = !p.function.empty() ? p.function : !cs.probe.empty() ? cs.probe : kDefaultProbe;
    auto scales = p.scales.empty() ? default_scales() : p.scales;
    if (scales.size() < 3) throw std::invalid_argument("need at least three scales");
    for (std::size_t k = 0; k < scales.size(); ++k) {
        if (scales[k] <= 0 || (k > 0 && scales[k] >= scales[k - 1])) {
            throw std::invalid_argument("scales must be positive and strictly decreasing");
        }
    }
    auto dict = p.dictionary.empty() ? cs.dictionary : p.dictionary;
    for (const auto& d : dict) {
        const auto& k = known_terms();
        if (std::find(k.begin(), k.end(), d) == k.end()) throw std::invalid_argument("unknown dictionary term '" + d + "'");
    }
    return {&cs, TestFunction(text, e.scheme.params()), scales, dict};
}

// E_5 at reference point (x, t) on the lattice scaled by eps.
double residual_at(const lattice::Scheme& s, const catalog::ContinuumSpec& cs, const TestFunction& f, double x,
                   double t, double eps) {
    auto c = s.make_configuration();
    for (std::size_t k = 0; k < c.size(); ++k) {
        const auto pos = cs.position(x, t, c.points()[k], eps);
        c.point(k) = {pos[0], pos[1], f(pos[0], pos[1])};
    }
    return s.residual_value(lattice::kResidualCount - 1, c);
}

}  // namespace

TestFunction::TestFunction(const std::string& text, const std::map<std::string, double>& params)
    : text_(text), expr_(dsl::Expression::parse(text)) {
    const auto& refs = expr_.refs();
    for (std::size_t k = 0; k < refs.size(); ++k) {
        const auto& r = refs[k];
        if (r.at != dsl::Offset{0, 0} || r.var == dsl::Var::U) {
            throw std::invalid_argument("test function may only use x and t, got " + dsl::to_string(r));
        }
        (r.var == dsl::Var::X ? x_slot_ : t_slot_) = static_cast<int>(k);
    }
    for (const auto& name : expr_.parameters()) {
        auto it = params.find(name);
        if (it == params.end()) throw std::invalid_argument("test function uses unknown parameter '" + name + "'");
        params_.push_back(it->second);
    }
}

double TestFunction::operator()(double x, double t) const {
    std::vector<double> refs(expr_.refs().size());
    if (x_slot_ >= 0) refs[static_cast<std::size_t>(x_slot_)] = x;
    if (t_slot_ >= 0) refs[static_cast<std::size_t>(t_slot_)] = t;
    return expr_.evaluate<double>(refs, params_);
}

Jet TestFunction::jet(double x, double t) const {
    std::vector<DD> p(params_.begin(), params_.end());
    return jet_of(
        [&](const DD& X, const DD& T) {
            std::vector<DD> refs(expr_.refs().size());
            if (x_slot_ >= 0) refs[static_cast<std::size_t>(x_slot_)] = X;
            if (t_slot_ >= 0) refs[static_cast<std::size_t>(t_slot_)] = T;
            return expr_.evaluate<DD>(refs, p);
        },
        x, t);
}

const std::vector<std::string>& known_terms() {
    static const std::vector<std::string> k = {"u_t", "u_x", "u_xx",  "u_xt", "u_tt",  "u",
                                               "1",   "u_x^2", "u*u_x", "u^p", "exp(u)"};
    return k;
}

double dictionary_term(const std::string& name, const Jet& j, const std::map<std::string, double>& params) {
    if (name == "u_t") return j.u_t;
    if (name == "u_x") return j.u_x;
    if (name == "u_xx") return j.u_xx;
    if (name == "u_xt") return j.u_xt;
    if (name == "u_tt") return j.u_tt;
    if (name == "u") return j.u;
    if (name == "1") return 1.0;
    if (name == "u_x^2") return j.u_x * j.u_x;
    if (name == "u*u_x") return j.u * j.u_x;
    if (name == "exp(u)") return std::exp(j.u);
    if (name == "u^p") {
        auto it = params.find("p");
        if (it == params.end()) throw std::invalid_argument("dictionary term u^p needs a parameter p");
        return std::pow(j.u, it->second);
    }
    throw std::invalid_argument("unknown dictionary term '" + name + "'");
}

std::vector<double> scaled_residuals(const catalog::CatalogEntry& e, const LimitProbe& probe) {
    const auto st = setup(e, probe);
    std::vector<double> out;
    for (double eps : st.scales) {
        const auto s = e.scheme.with_params(st.spec->scaled_params(eps));
        double worst = 0.0;
        for (const auto& p : sample_points()) worst = std::max(worst, std::abs(residual_at(s, *st.spec, st.probe, p[0], p[1], eps)));
        out.push_back(worst);
    }
    return out;
}

LimitFit leading_order_coefficients(const catalog::CatalogEntry& e, const LimitProbe& probe) {
    const auto st = setup(e, probe);
    const auto pts = sample_points();
    const auto np = static_cast<Eigen::Index>(pts.size());
    const auto nd = static_cast<Eigen::Index>(st.dictionary.size());
    const auto& params = e.scheme.params();

    Eigen::MatrixXd D(np, nd);
    for (Eigen::Index p = 0; p < np; ++p) {
        const Jet j = st.probe.jet(pts[static_cast<std::size_t>(p)][0], pts[static_cast<std::size_t>(p)][1]);
        for (Eigen::Index d = 0; d < nd; ++d) D(p, d) = dictionary_term(st.dictionary[static_cast<std::size_t>(d)], j, params);
    }
    if (!D.allFinite()) throw NumericalError("test function leaves the domain of a dictionary term");
    Eigen::VectorXd colscale = D.colwise().norm().transpose();
    for (Eigen::Index d = 0; d < nd; ++d) {
        if (colscale(d) == 0.0) throw NumericalError("dictionary term '" + st.dictionary[static_cast<std::size_t>(d)] + "' vanishes on the test function");
    }
    Eigen::MatrixXd Ds = D * colscale.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ds, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    LimitFit fit;
    fit.probe = st.probe.text();
    fit.dictionary = st.dictionary;
    fit.scales = st.scales;
    fit.condition = sv(nd - 1) > 0 ? sv(0) / sv(nd - 1) : std::numeric_limits<double>::infinity();
    if (!(fit.condition <= probe.condition_limit)) {
        std::ostringstream m;
        m << "dictionary fit is ill-conditioned (condition " << fit.condition << " > " << probe.condition_limit
          << "); the test function is degenerate for this dictionary";
        throw NumericalError(m.str());
    }

    std::vector<Eigen::VectorXd> raw, residuals;
    std::vector<Eigen::VectorXd> normalized;
    for (double eps : st.scales) {
        const auto s = e.scheme.with_params(st.spec->scaled_params(eps));
        Eigen::VectorXd r(np);
        for (Eigen::Index p = 0; p < np; ++p) {
            r(p) = residual_at(s, *st.spec, st.probe, pts[static_cast<std::size_t>(p)][0], pts[static_cast<std::size_t>(p)][1], eps);
        }
        if (!r.allFinite()) throw NumericalError("scheme residual is not finite at scale " + std::to_string(eps));
        Eigen::VectorXd c = svd.solve(r).cwiseQuotient(colscale);
        if (c(0) == 0.0) throw NumericalError("first dictionary term has zero coefficient; cannot normalize");
        fit.max_residual.push_back(r.cwiseAbs().maxCoeff());
        raw.push_back(c);
        residuals.push_back(r);
        normalized.push_back(c / c(0));
        fit.per_scale.emplace_back(normalized.back().data(), normalized.back().data() + nd);
    }

    // Order of convergence of the normalized coefficients from successive differences.
    const std::size_t K = st.scales.size();
    std::vector<double> orders;
    for (std::size_t k = 1; k + 1 < K; ++k) {
        const double d1 = (normalized[k] - normalized[k - 1]).norm();
        const double d2 = (normalized[k + 1] - normalized[k]).norm();
        if (d1 > 1e-13 && d2 > 1e-13) {
            orders.push_back(std::log(d1 / d2) / std::log((st.scales[k - 1] - st.scales[k]) / (st.scales[k] - st.scales[k + 1])));
        }
    }
    Eigen::VectorXd limit = normalized[K - 1];
    if (!orders.empty()) {
        std::vector<double> o = orders;
        std::sort(o.begin(), o.end());
        double q = std::clamp(o[o.size() / 2], 0.5, 4.0);
        if (std::abs(q - std::round(q)) < 0.3) q = std::round(q);
        // two Richardson levels (orders q and q + 1)
        auto level = [&](const std::vector<Eigen::VectorXd>& in, std::size_t offset, double order) {
            std::vector<Eigen::VectorXd> out;
            for (std::size_t k = 1; k < in.size(); ++k) {
                const double ratio = std::pow(st.scales[offset + k - 1] / st.scales[offset + k], order);
                out.push_back(in[k] + (in[k] - in[k - 1]) / (ratio - 1.0));
            }
            return out;
        };
        auto ext = level(normalized, 0, q);
        if (ext.size() >= 3) ext = level(ext, 1, q + 1);
        // truncation error falls and roundoff grows along the sequence; take the plateau
        limit = ext.back();
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < ext.size(); ++k) {
            const double d = (ext[k] - ext[k - 1]).norm();
            if (d < best) {
                best = d;
                limit = ext[k];
            }
        }
    }
    for (Eigen::Index d = 0; d < nd; ++d) {
        double v = limit(d);
        if (std::abs(v) < 1e-12) v = 0.0;
        fit.coefficients[st.dictionary[static_cast<std::size_t>(d)]] = v;
    }
    fit.normalization = raw[K - 1](0);

    // Remainder of the normalized residual after removing the limiting PDE.
    const Eigen::VectorXd pde = D * limit;
    const double pde_scale = std::max(pde.cwiseAbs().maxCoeff(), D.col(0).cwiseAbs().maxCoeff());
    for (std::size_t k = 0; k < K; ++k) {
        fit.remainder.push_back((residuals[k] / raw[k](0) - pde).cwiseAbs().maxCoeff() / pde_scale);
    }
    std::vector<double> rorders;
    for (std::size_t k = 0; k + 1 < K; ++k) {
        if (fit.remainder[k] > 1e-11 && fit.remainder[k + 1] > 1e-11) {
            rorders.push_back(std::log(fit.remainder[k] / fit.remainder[k + 1]) / std::log(st.scales[k] / st.scales[k + 1]));
        }
    }
    if (rorders.empty()) {
        fit.order = std::numeric_limits<double>::infinity();
    } else {
        std::sort(rorders.begin(), rorders.end());
        fit.order = rorders[rorders.size() / 2];
    }
    if (!(fit.order > 0.0)) {
        std::ostringstream m;
        m << "remainder does not shrink with the lattice scale (observed order " << fit.order << ")";
        throw NumericalError(m.str());
    }
    return fit;
}

ChangeOfVariablesReport verify_change_of_variables(double c, BetaScaling scaling, double k) {
    if (!std::isfinite(c)) throw std::invalid_argument("c must be finite");
    const double q = 1.0 + c * c;
    const double s = scaling == BetaScaling::Corrected ? q * q : q;
    auto u = [&](const DD& x, const DD& t) {
        const DD alpha = x + DD(c) * t;
        const DD beta = DD(s) * (t - DD(c) * x);
        const DD pre = DD(c) * (DD(2.0 + c * c) * x + DD(c) * t) / DD(4.0 * q * q);
        using dsl::exp;
        return exp(pre) * exp(alpha + DD(k) * beta);
    };
    ChangeOfVariablesReport rep;
    rep.c = c;
    double worst = 0.0;
    for (int a = 0; a < 10; ++a) {
        for (int b = 0; b < 10; ++b) {
            const double x = -1.0 + 2.0 * a / 9.0;
            const double t = 0.1 + 0.9 * b / 9.0;
            const Jet j = jet_of(u, x, t);
            worst = std::max(worst, std::abs(j.u_t - j.u_xx - 2 * c * j.u_xt - c * c * j.u_tt));
            rep.max_u_t = std::max(rep.max_u_t, std::abs(j.u_t));
            ++rep.points;
        }
    }
    rep.max_relative_residual = rep.max_u_t > 0 ? worst / rep.max_u_t : worst;
    return rep;
}

}  // namespace latsym::continuum
