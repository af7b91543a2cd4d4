#include "latsym/symmetry/ansatz.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "latsym/errors.hpp"

namespace latsym::symmetry {

namespace {

std::string monomial_name(const Monomial& m, bool light_cone) {
    std::string out;
    auto factor = [&](const char* v, int p) {
        if (p == 0) return;
        if (!out.empty()) out += "*";
        out += v;
        if (p > 1) out += "^" + std::to_string(p);
    };
    factor("x", m.a);
    factor(light_cone ? "y" : "t", m.b);
    factor("u", m.c);
    return out.empty() ? "1" : out;
}

double ipow(double v, int p) {
    double r = 1.0;
    for (int k = 0; k < p; ++k) r *= v;
    return r;
}

}  // namespace

AnsatzBasis::AnsatzBasis(int deg_x, int deg_t, int deg_u, std::vector<std::string> registered,
                         const std::map<std::string, double>& params, bool light_cone)
    : deg_x_(deg_x), deg_t_(deg_t), deg_u_(deg_u), light_cone_(light_cone) {
    if (deg_x < 0 || deg_t < 0 || deg_u < 0) throw std::invalid_argument("ansatz degrees must be non-negative");
    for (int d = 0; d <= deg_x + deg_t + deg_u; ++d) {
        for (int a = std::min(d, deg_x); a >= 0; --a) {
            for (int b = std::min(d - a, deg_t); b >= 0; --b) {
                int c = d - a - b;
                if (c <= deg_u) monomials_.push_back({a, b, c});
            }
        }
    }
    for (const auto& m : monomials_) {
        names_.push_back(monomial_name(m, light_cone));
        depends_u_.push_back(m.c > 0);
    }
    for (auto& text : registered) {
        auto e = dsl::Expression::parse(text).bind(params);
        if (!e.parameters().empty()) {
            throw std::invalid_argument("registered basis function '" + text + "' has unbound parameter '" +
                                        e.parameters().front() + "'");
        }
        bool has_u = false;
        for (const auto& r : e.refs()) {
            if (r.at != dsl::Offset{0, 0}) {
                throw std::invalid_argument("registered basis function '" + text + "' may only use bare x, t, u");
            }
            has_u = has_u || r.var == dsl::Var::U;
        }
        registered_.push_back(e);
        registered_text_.push_back(text);
        names_.push_back(text);
        depends_u_.push_back(has_u);
    }
    double cond = probe_conditioning();
    if (!(cond > 1e-8)) {
        throw NumericalError("ansatz basis is numerically dependent on the probe set (conditioning " +
                             std::to_string(cond) + ")");
    }
}

int AnsatzBasis::index_of(const Monomial& m) const {
    auto it = std::find(monomials_.begin(), monomials_.end(), m);
    return it == monomials_.end() ? -1 : static_cast<int>(it - monomials_.begin());
}

void AnsatzBasis::values(double x, double t, double u, std::span<double> out) const {
    double px[8], pt[8], pu[8];
    px[0] = pt[0] = pu[0] = 1.0;
    for (int k = 1; k <= std::min(deg_x_, 7); ++k) px[k] = px[k - 1] * x;
    for (int k = 1; k <= std::min(deg_t_, 7); ++k) pt[k] = pt[k - 1] * t;
    for (int k = 1; k <= std::min(deg_u_, 7); ++k) pu[k] = pu[k - 1] * u;
    const bool small = deg_x_ < 8 && deg_t_ < 8 && deg_u_ < 8;
    for (std::size_t k = 0; k < monomials_.size(); ++k) {
        const auto& m = monomials_[k];
        out[k] = small ? px[m.a] * pt[m.b] * pu[m.c] : ipow(x, m.a) * ipow(t, m.b) * ipow(u, m.c);
    }
    for (std::size_t r = 0; r < registered_.size(); ++r) {
        const auto& e = registered_[r];
        double vals[3];
        std::size_t n = 0;
        for (const auto& ref : e.refs()) vals[n++] = ref.var == dsl::Var::X ? x : ref.var == dsl::Var::T ? t : u;
        out[monomials_.size() + r] = e.evaluate<double>(std::span<const double>(vals, n), {});
    }
}

double AnsatzBasis::value(std::size_t k, double x, double t, double u) const {
    if (k < monomials_.size()) {
        const auto& m = monomials_[k];
        return ipow(x, m.a) * ipow(t, m.b) * ipow(u, m.c);
    }
    const auto& e = registered_[k - monomials_.size()];
    double vals[3];
    std::size_t n = 0;
    for (const auto& ref : e.refs()) vals[n++] = ref.var == dsl::Var::X ? x : ref.var == dsl::Var::T ? t : u;
    return e.evaluate<double>(std::span<const double>(vals, n), {});
}

void AnsatzBasis::values_and_gradients(double x, double t, double u, std::span<double> out,
                                       std::span<double> grad) const {
    for (std::size_t k = 0; k < monomials_.size(); ++k) {
        const auto& m = monomials_[k];
        const double vx = ipow(x, m.a), vt = ipow(t, m.b), vu = ipow(u, m.c);
        out[k] = vx * vt * vu;
        grad[3 * k + 0] = m.a ? m.a * ipow(x, m.a - 1) * vt * vu : 0.0;
        grad[3 * k + 1] = m.b ? m.b * ipow(t, m.b - 1) * vx * vu : 0.0;
        grad[3 * k + 2] = m.c ? m.c * ipow(u, m.c - 1) * vx * vt : 0.0;
    }
    for (std::size_t r = 0; r < registered_.size(); ++r) {
        const auto& e = registered_[r];
        double vals[3], g[3] = {0, 0, 0};
        std::size_t n = 0;
        for (const auto& ref : e.refs()) vals[n++] = ref.var == dsl::Var::X ? x : ref.var == dsl::Var::T ? t : u;
        const std::size_t k = monomials_.size() + r;
        out[k] = e.value_and_gradient(std::span<const double>(vals, n), {}, std::span<double>(g, n));
        grad[3 * k + 0] = grad[3 * k + 1] = grad[3 * k + 2] = 0.0;
        for (std::size_t q = 0; q < n; ++q) grad[3 * k + static_cast<std::size_t>(e.refs()[q].var)] = g[q];
    }
}

double AnsatzBasis::probe_conditioning() const {
    const std::size_t n = size();
    if (n == 0) return 1.0;
    auto pts = probe_points(5 * n);
    Eigen::MatrixXd B(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(n));
    std::vector<double> row(n);
    for (std::size_t p = 0; p < pts.size(); ++p) {
        values(pts[p][0], pts[p][1], pts[p][2], row);
        for (std::size_t k = 0; k < n; ++k) B(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k)) = row[k];
    }
    for (Eigen::Index k = 0; k < B.cols(); ++k) {
        double nrm = B.col(k).norm();
        if (nrm > 0) B.col(k) /= nrm;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
    const auto& s = svd.singularValues();
    return s(s.size() - 1) / s(0);
}

std::string AnsatzBasis::description() const {
    std::string out = "x^a " + std::string(light_cone_ ? "y" : "t") + "^b u^c with a<=" + std::to_string(deg_x_) +
                      ", b<=" + std::to_string(deg_t_) + ", c<=" + std::to_string(deg_u_);
    for (const auto& r : registered_text_) out += " + {" + r + "}";
    return out;
}

std::vector<std::array<double, 3>> probe_points(std::size_t count, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> xt(-3.0, 3.0);
    std::uniform_real_distribution<double> uu(-2.0, 2.0);
    std::vector<std::array<double, 3>> out(count);
    for (auto& p : out) {
        p[0] = xt(rng);
        p[1] = xt(rng);
        p[2] = uu(rng);
    }
    return out;
}

}  // namespace latsym::symmetry
