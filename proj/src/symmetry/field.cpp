#include "latsym/symmetry/field.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "latsym/errors.hpp"

namespace latsym::symmetry {

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

dsl::Expression component_expression(const std::string& text, const std::map<std::string, double>& params) {
    auto e = dsl::Expression::parse(text).bind(params);
    if (!e.parameters().empty()) {
        throw std::invalid_argument("field component '" + text + "' uses unbound parameter '" + e.parameters().front() +
                                    "'");
    }
    for (const auto& r : e.refs()) {
        if (r.at != dsl::Offset{0, 0}) {
            throw std::invalid_argument("field component '" + text + "' may only use bare x, t (or y) and u");
        }
    }
    return e;
}

double eval_at(const dsl::Expression& e, double x, double t, double u) {
    double vals[3];
    std::size_t n = 0;
    for (const auto& r : e.refs()) vals[n++] = r.var == dsl::Var::X ? x : r.var == dsl::Var::T ? t : u;
    return e.evaluate<double>(std::span<const double>(vals, n), {});
}

std::string number(double c) {
    char buf[40];
    double r = std::round(c);
    if (std::abs(c - r) <= 1e-9 * std::max(1.0, std::abs(c))) {
        std::snprintf(buf, sizeof buf, "%.0f", r);
    } else {
        std::snprintf(buf, sizeof buf, "%.12g", c);
    }
    std::string s = buf;
    return s == "-0" ? "0" : s;
}

}  // namespace

std::array<std::string, 3> split_field_text(const std::string& text) {
    std::array<std::string, 3> out{"0", "0", "0"};
    std::array<bool, 3> seen{false, false, false};
    std::string normalized = text;
    for (char& ch : normalized) {
        if (ch == '\n') ch = ';';
    }
    std::stringstream ss(normalized);
    std::string part;
    while (std::getline(ss, part, ';')) {
        part = trim(part);
        if (part.empty() || part[0] == '#') continue;
        auto eq = part.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("field text: expected 'name = expression' in '" + part + "'");
        std::string key = trim(part.substr(0, eq));
        std::string val = trim(part.substr(eq + 1));
        int k = key == "xi" ? 0 : (key == "tau" || key == "eta") ? 1 : key == "phi" ? 2 : -1;
        if (k < 0) throw std::invalid_argument("field text: unknown component '" + key + "' (expected xi, tau, phi)");
        if (seen[static_cast<std::size_t>(k)]) throw std::invalid_argument("field text: component '" + key + "' given twice");
        seen[static_cast<std::size_t>(k)] = true;
        out[static_cast<std::size_t>(k)] = val.empty() ? "0" : val;
    }
    if (!seen[0] && !seen[1] && !seen[2]) throw std::invalid_argument("field text: no components found");
    return out;
}

VectorField::VectorField(std::shared_ptr<const AnsatzBasis> basis) : basis_(std::move(basis)) {
    const auto n = static_cast<Eigen::Index>(basis_->size());
    for (auto& c : c_) c = Eigen::VectorXd::Zero(n);
    index_nonzeros();
}

VectorField::VectorField(std::shared_ptr<const AnsatzBasis> basis, Eigen::VectorXd xi, Eigen::VectorXd tau,
                         Eigen::VectorXd phi)
    : basis_(std::move(basis)), c_{std::move(xi), std::move(tau), std::move(phi)} {
    for (const auto& c : c_) {
        if (c.size() != static_cast<Eigen::Index>(basis_->size())) {
            throw std::invalid_argument("vector field coefficient length does not match the basis");
        }
    }
    index_nonzeros();
}

VectorField VectorField::from_stacked(std::shared_ptr<const AnsatzBasis> basis, const Eigen::VectorXd& c) {
    const auto n = static_cast<Eigen::Index>(basis->size());
    if (c.size() != 3 * n) throw std::invalid_argument("stacked coefficient length does not match the basis");
    return VectorField(basis, c.segment(0, n), c.segment(n, n), c.segment(2 * n, n));
}

void VectorField::index_nonzeros() {
    for (int k = 0; k < 3; ++k) {
        auto& nz = nz_[static_cast<std::size_t>(k)];
        nz.clear();
        const auto& c = c_[static_cast<std::size_t>(k)];
        for (Eigen::Index j = 0; j < c.size(); ++j) {
            if (c(j) != 0.0) nz.push_back(static_cast<int>(j));
        }
    }
}

Eigen::VectorXd VectorField::stacked() const {
    const auto n = c_[0].size();
    Eigen::VectorXd out(3 * n);
    out << c_[0], c_[1], c_[2];
    return out;
}

Point VectorField::operator()(double x, double t, double u) const {
    Point p{0.0, 0.0, 0.0};
    std::vector<std::pair<int, double>> cache;  // registered functions used by more than one component
    for (int k = 0; k < 3; ++k) {
        const auto& c = c_[static_cast<std::size_t>(k)];
        double s = 0.0;
        for (int j : nz_[static_cast<std::size_t>(k)]) {
            const auto idx = static_cast<std::size_t>(j);
            if (basis_->is_monomial(idx)) {
                s += c(j) * basis_->value(idx, x, t, u);
                continue;
            }
            auto it = std::find_if(cache.begin(), cache.end(), [j](const auto& e) { return e.first == j; });
            if (it == cache.end()) {
                cache.emplace_back(j, basis_->value(idx, x, t, u));
                it = cache.end() - 1;
            }
            s += c(j) * it->second;
        }
        p[static_cast<std::size_t>(k)] = s;
    }
    return p;
}

FieldFunction VectorField::function() const {
    VectorField copy = *this;
    return [copy](double x, double t, double u) { return copy(x, t, u); };
}

Point evaluate_field(const VectorField& v, const Point& p) { return v(p[0], p[1], p[2]); }

std::string VectorField::component_text(int k, double rel_tol) const {
    double big = 0.0;
    for (const auto& c : c_) big = std::max(big, c.cwiseAbs().maxCoeff());
    const auto& c = c_[static_cast<std::size_t>(k)];
    std::string out;
    for (Eigen::Index j = 0; j < c.size(); ++j) {
        double v = c(j);
        if (v == 0.0 || std::abs(v) <= rel_tol * big) continue;
        const std::string& name = basis_->name(static_cast<std::size_t>(j));
        std::string mag = number(std::abs(v));
        bool is_one = mag == "1";
        std::string atom = name;
        if (!basis_->is_monomial(static_cast<std::size_t>(j))) {
            // wrap registered functions unless multiplication already binds correctly
            auto bare = dsl::Expression::parse("2*" + name);
            auto wrapped = dsl::Expression::parse("2*(" + name + ")");
            if (!(bare == wrapped)) atom = "(" + name + ")";
        }
        std::string term = name == "1" ? mag : (is_one ? atom : mag + "*" + atom);
        if (out.empty()) {
            out = (v < 0 ? "-" : "") + term;
        } else {
            out += (v < 0 ? " - " : " + ") + term;
        }
    }
    return out.empty() ? "0" : out;
}

std::string VectorField::to_text(double rel_tol) const {
    return "xi = " + component_text(0, rel_tol) + "; " + (basis_->light_cone() ? "eta" : "tau") + " = " +
           component_text(1, rel_tol) + "; phi = " + component_text(2, rel_tol);
}

VectorField VectorField::from_components(const std::string& xi, const std::string& tau, const std::string& phi,
                                         std::shared_ptr<const AnsatzBasis> basis,
                                         const std::map<std::string, double>& params) {
    const std::size_t n = basis->size();
    const auto pts = probe_points(std::max<std::size_t>(5 * n, 60), 77u);
    Eigen::MatrixXd B(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(n));
    std::vector<double> row(n);
    for (std::size_t p = 0; p < pts.size(); ++p) {
        basis->values(pts[p][0], pts[p][1], pts[p][2], row);
        for (std::size_t k = 0; k < n; ++k) B(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k)) = row[k];
    }
    Eigen::VectorXd scale = B.colwise().norm().transpose();
    for (Eigen::Index k = 0; k < B.cols(); ++k) B.col(k) /= scale(k);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);

    std::array<Eigen::VectorXd, 3> coef;
    const std::array<const std::string*, 3> texts{&xi, &tau, &phi};
    for (int k = 0; k < 3; ++k) {
        auto e = component_expression(*texts[static_cast<std::size_t>(k)], params);
        Eigen::VectorXd f(static_cast<Eigen::Index>(pts.size()));
        for (std::size_t p = 0; p < pts.size(); ++p) f(static_cast<Eigen::Index>(p)) = eval_at(e, pts[p][0], pts[p][1], pts[p][2]);
        Eigen::VectorXd c = qr.solve(f);
        const double fn = f.norm();
        const double res = (B * c - f).norm();
        if (fn > 0 && res > 1e-8 * fn) {
            throw SpanEscape("field component '" + *texts[static_cast<std::size_t>(k)] +
                             "' is not in the span of the ansatz basis (relative residual " + std::to_string(res / fn) +
                             ")");
        }
        c = c.cwiseQuotient(scale);
        const double big = c.cwiseAbs().maxCoeff();
        for (Eigen::Index j = 0; j < c.size(); ++j) {
            if (std::abs(c(j)) <= 1e-11 * big) c(j) = 0.0;
        }
        if (fn == 0.0) c.setZero();
        coef[static_cast<std::size_t>(k)] = c;
    }
    return VectorField(std::move(basis), coef[0], coef[1], coef[2]);
}

VectorField VectorField::from_text(const std::string& text, std::shared_ptr<const AnsatzBasis> basis,
                                   const std::map<std::string, double>& params) {
    auto parts = split_field_text(text);
    return from_components(parts[0], parts[1], parts[2], std::move(basis), params);
}

void VectorField::check_compatible(const VectorField& o) const {
    if (basis_ != o.basis_ && !(*basis_ == *o.basis_)) throw std::invalid_argument("vector fields over different bases");
}

VectorField VectorField::operator+(const VectorField& o) const {
    check_compatible(o);
    return VectorField(basis_, c_[0] + o.c_[0], c_[1] + o.c_[1], c_[2] + o.c_[2]);
}

VectorField VectorField::operator-(const VectorField& o) const {
    check_compatible(o);
    return VectorField(basis_, c_[0] - o.c_[0], c_[1] - o.c_[1], c_[2] - o.c_[2]);
}

VectorField VectorField::operator*(double s) const { return VectorField(basis_, c_[0] * s, c_[1] * s, c_[2] * s); }

ExpressionField::ExpressionField(const std::string& xi, const std::string& tau, const std::string& phi,
                                 const std::map<std::string, double>& params)
    : e_{component_expression(xi, params), component_expression(tau, params), component_expression(phi, params)} {}

ExpressionField ExpressionField::from_text(const std::string& text, const std::map<std::string, double>& params) {
    auto p = split_field_text(text);
    return ExpressionField(p[0], p[1], p[2], params);
}

Point ExpressionField::operator()(double x, double t, double u) const {
    return {eval_at(e_[0], x, t, u), eval_at(e_[1], x, t, u), eval_at(e_[2], x, t, u)};
}

FieldFunction ExpressionField::function() const {
    ExpressionField copy = *this;
    return [copy](double x, double t, double u) { return copy(x, t, u); };
}

std::string ExpressionField::to_text() const {
    return "xi = " + e_[0].to_string() + "; tau = " + e_[1].to_string() + "; phi = " + e_[2].to_string();
}

}  // namespace latsym::symmetry
