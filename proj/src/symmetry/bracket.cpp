#include "latsym/symmetry/bracket.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>

#include "latsym/errors.hpp"

namespace latsym::symmetry {

namespace {

using Poly = std::map<Monomial, double>;

bool polynomial_only(const VectorField& v) {
    const auto& b = v.basis();
    for (int k = 0; k < 3; ++k) {
        const auto& c = v.component(k);
        for (Eigen::Index j = static_cast<Eigen::Index>(b.monomial_count()); j < c.size(); ++j) {
            if (c(j) != 0.0) return false;
        }
    }
    return true;
}

Poly to_poly(const VectorField& v, int k) {
    Poly p;
    const auto& c = v.component(k);
    for (std::size_t j = 0; j < v.basis().monomial_count(); ++j) {
        if (c(static_cast<Eigen::Index>(j)) != 0.0) p[v.basis().monomial(j)] = c(static_cast<Eigen::Index>(j));
    }
    return p;
}

// Accumulates sum_d f_d * d/dvar_d g into acc.
void apply(const std::array<Poly, 3>& f, const Poly& g, Poly& acc) {
    for (int d = 0; d < 3; ++d) {
        for (const auto& [mf, cf] : f[static_cast<std::size_t>(d)]) {
            for (const auto& [mg, cg] : g) {
                int power = d == 0 ? mg.a : d == 1 ? mg.b : mg.c;
                if (power == 0) continue;
                Monomial m{mf.a + mg.a - (d == 0), mf.b + mg.b - (d == 1), mf.c + mg.c - (d == 2)};
                acc[m] += cf * cg * power;
            }
        }
    }
}

Bracket symbolic(const VectorField& a, const VectorField& b, const std::shared_ptr<const AnsatzBasis>& out) {
    std::array<Poly, 3> pa{to_poly(a, 0), to_poly(a, 1), to_poly(a, 2)};
    std::array<Poly, 3> pb{to_poly(b, 0), to_poly(b, 1), to_poly(b, 2)};
    const auto n = static_cast<Eigen::Index>(out->size());
    std::array<Eigen::VectorXd, 3> coef;
    double scale = 0.0;
    for (int k = 0; k < 3; ++k) {
        scale = std::max({scale, a.component(k).cwiseAbs().maxCoeff(), b.component(k).cwiseAbs().maxCoeff()});
    }
    for (int k = 0; k < 3; ++k) {
        Poly ab, ba;
        apply(pa, pb[static_cast<std::size_t>(k)], ab);
        apply(pb, pa[static_cast<std::size_t>(k)], ba);
        Poly diff = ab;
        for (const auto& [m, v] : ba) diff[m] -= v;
        Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
        for (const auto& [m, v] : diff) {
            if (v == 0.0) continue;
            int idx = out->index_of(m);
            if (idx < 0) {
                if (std::abs(v) <= 1e-14 * scale * scale) continue;
                throw SpanEscape("Lie bracket produces x^" + std::to_string(m.a) + " t^" + std::to_string(m.b) + " u^" +
                                 std::to_string(m.c) + ", outside the ansatz span");
            }
            c(idx) = v;
        }
        coef[static_cast<std::size_t>(k)] = c;
    }
    return {VectorField(out, coef[0], coef[1], coef[2]), 0.0, true};
}

Bracket numeric(const VectorField& a, const VectorField& b, const std::shared_ptr<const AnsatzBasis>& out) {
    const auto& ba = a.basis();
    const std::size_t n_in = ba.size();
    const std::size_t n_out = out->size();
    const auto pts = probe_points(std::max<std::size_t>(5 * std::max(n_in, n_out), 60), 91u);
    const auto np = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd B(np, static_cast<Eigen::Index>(n_out));
    std::array<Eigen::VectorXd, 3> target{Eigen::VectorXd(np), Eigen::VectorXd(np), Eigen::VectorXd(np)};
    std::vector<double> vin(n_in), gin(3 * n_in), vout(n_out);
    for (Eigen::Index p = 0; p < np; ++p) {
        const auto& pt = pts[static_cast<std::size_t>(p)];
        ba.values_and_gradients(pt[0], pt[1], pt[2], vin, gin);
        out->values(pt[0], pt[1], pt[2], vout);
        for (std::size_t j = 0; j < n_out; ++j) B(p, static_cast<Eigen::Index>(j)) = vout[j];
        // field values and gradients of each component
        double fa[3] = {0, 0, 0}, fb[3] = {0, 0, 0};
        double ga[3][3] = {}, gb[3][3] = {};
        for (int k = 0; k < 3; ++k) {
            for (std::size_t j = 0; j < n_in; ++j) {
                const double ca = a.component(k)(static_cast<Eigen::Index>(j));
                const double cb = b.component(k)(static_cast<Eigen::Index>(j));
                fa[k] += ca * vin[j];
                fb[k] += cb * vin[j];
                for (int d = 0; d < 3; ++d) {
                    ga[k][d] += ca * gin[3 * j + static_cast<std::size_t>(d)];
                    gb[k][d] += cb * gin[3 * j + static_cast<std::size_t>(d)];
                }
            }
        }
        for (int k = 0; k < 3; ++k) {
            double v = 0.0;
            for (int d = 0; d < 3; ++d) v += fa[d] * gb[k][d] - fb[d] * ga[k][d];
            target[static_cast<std::size_t>(k)](p) = v;
        }
    }
    Eigen::VectorXd scale = B.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < B.cols(); ++j) B.col(j) /= scale(j);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
    std::array<Eigen::VectorXd, 3> coef;
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
        const auto& f = target[static_cast<std::size_t>(k)];
        Eigen::VectorXd c = qr.solve(f);
        const double fn = f.norm();
        if (fn > 0) worst = std::max(worst, (B * c - f).norm() / fn);
        c = c.cwiseQuotient(scale);
        const double big = c.cwiseAbs().maxCoeff();
        for (Eigen::Index j = 0; j < c.size(); ++j) {
            if (std::abs(c(j)) <= 1e-12 * big) c(j) = 0.0;
        }
        if (fn == 0.0) c.setZero();
        coef[static_cast<std::size_t>(k)] = c;
    }
    if (worst > 1e-6) {
        throw SpanEscape("Lie bracket leaves the ansatz span (re-expansion residual " + std::to_string(worst) + ")");
    }
    return {VectorField(out, coef[0], coef[1], coef[2]), worst, false};
}

}  // namespace

Bracket lie_bracket_ex(const VectorField& a, const VectorField& b, std::shared_ptr<const AnsatzBasis> out) {
    if (!(a.basis() == b.basis())) throw std::invalid_argument("lie_bracket: fields over different bases");
    if (!out) out = a.basis_ptr();
    if (polynomial_only(a) && polynomial_only(b)) return symbolic(a, b, out);
    return numeric(a, b, out);
}

VectorField lie_bracket(const VectorField& a, const VectorField& b, std::shared_ptr<const AnsatzBasis> out) {
    return lie_bracket_ex(a, b, std::move(out)).field;
}

}  // namespace latsym::symmetry
