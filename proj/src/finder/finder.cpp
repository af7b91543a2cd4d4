#include "latsym/finder/finder.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "latsym/errors.hpp"
#include "latsym/symmetry/bracket.hpp"
#include "latsym/symmetry/prolong.hpp"

namespace latsym::finder {

namespace {

// stacked index of every free coefficient
std::vector<Eigen::Index> free_columns(const AnsatzBasis& b, bool u_dependent_lattice) {
    std::vector<Eigen::Index> out;
    const auto n = static_cast<Eigen::Index>(b.size());
    for (int k = 0; k < 3; ++k) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (k < 2 && !u_dependent_lattice && b.depends_on_u(static_cast<std::size_t>(j))) continue;
            out.push_back(k * n + j);
        }
    }
    return out;
}

// Orthonormal basis of the column span; singular values at or below `tol`
// (times the largest when `relative`) are dropped.
Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& a, double tol, bool relative = true) {
    if (a.cols() == 0) return Eigen::MatrixXd(a.rows(), 0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    const double bar = relative ? tol * s(0) : tol;
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > bar) ++r;
    return svd.matrixU().leftCols(r);
}

void snap_small(Eigen::VectorXd& v, double rel) {
    const double big = v.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        if (std::abs(v(j)) <= rel * big) v(j) = 0.0;
    }
}

struct Tidy {
    std::vector<Eigen::VectorXd> vectors;
    std::vector<std::string> names;
};

// Readable basis of span(Q) (orthonormal columns): oracle vectors lying in the
// span first, then the rest in reduced row echelon form so each vector is
// anchored at the earliest coefficient it can own.
Tidy tidy(const Eigen::MatrixXd& Q, const std::vector<std::pair<std::string, Eigen::VectorXd>>& oracle) {
    Tidy out;
    const Eigen::Index dim = Q.rows();
    Eigen::MatrixXd accepted(dim, 0);
    for (const auto& [name, o] : oracle) {
        if (static_cast<Eigen::Index>(out.vectors.size()) == Q.cols()) break;
        const double on = o.norm();
        if (on == 0.0) continue;
        Eigen::VectorXd p = Q * (Q.transpose() * o);
        if ((p - o).norm() > 1e-6 * on) continue;
        Eigen::VectorXd rest = p;
        if (accepted.cols() > 0) rest -= accepted * (accepted.transpose() * p);
        if (rest.norm() <= 1e-6 * p.norm()) continue;
        snap_small(p, 1e-10);
        out.vectors.push_back(p);
        out.names.push_back(name);
        accepted.conservativeResize(Eigen::NoChange, accepted.cols() + 1);
        accepted.col(accepted.cols() - 1) = rest.normalized();
    }
    Eigen::MatrixXd remaining = Q;
    if (accepted.cols() > 0) remaining -= accepted * (accepted.transpose() * Q);
    Eigen::MatrixXd R = orthonormal_columns(remaining, 1e-8, false).transpose();  // rows span the rest
    const double big = R.size() ? R.cwiseAbs().maxCoeff() : 0.0;
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < dim && row < R.rows(); ++col) {
        Eigen::Index piv = row;
        double best = 0.0;
        for (Eigen::Index r = row; r < R.rows(); ++r) {
            if (std::abs(R(r, col)) > best) {
                best = std::abs(R(r, col));
                piv = r;
            }
        }
        if (best <= 1e-8 * big) continue;
        R.row(row).swap(R.row(piv));
        R.row(row) /= R(row, col);
        for (Eigen::Index r = 0; r < R.rows(); ++r) {
            if (r != row && R(r, col) != 0.0) R.row(r) -= R(r, col) * R.row(row);
        }
        ++row;
    }
    for (Eigen::Index r = 0; r < R.rows(); ++r) {
        Eigen::VectorXd v = R.row(r).transpose();
        snap_small(v, 1e-10);
        out.vectors.push_back(v);
        out.names.push_back("");
    }
    return out;
}

Eigen::MatrixXd stack(const std::vector<VectorField>& fields, Eigen::Index dim) {
    Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(fields.size()));
    for (std::size_t k = 0; k < fields.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = fields[k].stacked();
    return m;
}

// Rows of the stacked coefficient vector that must vanish in the superposition sector.
std::vector<Eigen::Index> non_superposition_rows(const AnsatzBasis& b) {
    std::vector<Eigen::Index> out;
    const auto n = static_cast<Eigen::Index>(b.size());
    for (Eigen::Index j = 0; j < 2 * n; ++j) out.push_back(j);
    for (Eigen::Index j = 0; j < n; ++j) {
        if (b.depends_on_u(static_cast<std::size_t>(j))) out.push_back(2 * n + j);
    }
    return out;
}

struct SplitSpans {
    Eigen::MatrixXd finite;
    Eigen::MatrixXd superposition;
};

SplitSpans split_spans(const Eigen::MatrixXd& Q, const AnsatzBasis& b, double tol) {
    const auto rows = non_superposition_rows(b);
    Eigen::MatrixXd C(static_cast<Eigen::Index>(rows.size()), Q.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) C.row(static_cast<Eigen::Index>(r)) = Q.row(rows[r]);
    SplitSpans out;
    if (Q.cols() == 0) {
        out.finite = out.superposition = Eigen::MatrixXd(Q.rows(), 0);
        return out;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > tol) ++r;
    const Eigen::MatrixXd& V = svd.matrixV();
    out.finite = Q * V.leftCols(r);
    out.superposition = Q * V.rightCols(Q.cols() - r);
    return out;
}

std::vector<std::pair<std::string, Eigen::VectorXd>> oracle_vectors(const FinderOptions& opts,
                                                                    const std::shared_ptr<const AnsatzBasis>& b) {
    std::vector<std::pair<std::string, Eigen::VectorXd>> out;
    for (const auto& f : opts.oracle) {
        try {
            auto v = VectorField::from_components(f.xi, f.tau, f.phi, b, opts.oracle_params);
            out.emplace_back(f.name, v.stacked());
        } catch (const SpanEscape&) {
        }
    }
    return out;
}

}  // namespace

const char* sector_name(Sector s) { return s == Sector::Finite ? "finite" : "superposition"; }

std::vector<VectorField> SymmetryBasis::in_sector(Sector s) const {
    std::vector<VectorField> out;
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (sectors[k] == s) out.push_back(fields[k]);
    }
    return out;
}

int SymmetryBasis::dimension(Sector s) const {
    return static_cast<int>(std::count(sectors.begin(), sectors.end(), s));
}

int coefficient_count(const AnsatzBasis& b, bool u_dependent_lattice) {
    return static_cast<int>(free_columns(b, u_dependent_lattice).size());
}

Eigen::MatrixXd constraint_matrix(const Scheme& s, const AnsatzBasis& b, bool u_dependent_lattice,
                                  const std::vector<lattice::StencilConfiguration>& configs) {
    const auto cols = free_columns(b, u_dependent_lattice);
    Eigen::MatrixXd M(lattice::kResidualCount * static_cast<Eigen::Index>(configs.size()),
                      static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < configs.size(); ++k) {
        Eigen::MatrixXd rows = symmetry::invariance_rows(b, s, configs[k]);
        for (std::size_t j = 0; j < cols.size(); ++j) {
            M.block(lattice::kResidualCount * static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j),
                    lattice::kResidualCount, 1) = rows.col(cols[j]);
        }
    }
    return M;
}

SymmetryBasis find_symmetries(const Scheme& s, std::shared_ptr<const AnsatzBasis> basis, const FinderOptions& opts) {
    if (basis->light_cone() != s.light_cone()) {
        throw std::invalid_argument("ansatz coordinate names do not match the scheme (t versus y)");
    }
    const auto cols = free_columns(*basis, opts.u_dependent_lattice);
    const int ncoef = static_cast<int>(cols.size());
    int samples = opts.samples > 0 ? opts.samples : std::max(3 * ncoef, 100);
    if (samples < ncoef + 5) {
        throw std::invalid_argument("finder needs at least " + std::to_string(ncoef + 5) + " samples for " +
                                    std::to_string(ncoef) + " coefficients");
    }
    auto sampling = opts.sampling;
    sampling.seed = opts.seed;
    lattice::OnShellSampler sampler(s, sampling);
    const auto configs = sampler.draw(samples);

    Eigen::MatrixXd M = constraint_matrix(s, *basis, opts.u_dependent_lattice, configs);
    Eigen::MatrixXd W = M;
    for (Eigen::Index r = 0; r < W.rows(); ++r) {
        const double nr = W.row(r).norm();
        if (nr > 0) W.row(r) /= nr;
    }
    Eigen::VectorXd scale(W.cols());
    const double widest = W.colwise().norm().maxCoeff();
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
        const double nc = W.col(j).norm();
        if (nc <= 1e-12 * widest) {
            // roundoff-level column: the coefficient is unconstrained
            W.col(j).setZero();
            scale(j) = 1.0;
        } else {
            scale(j) = nc;
            W.col(j) /= nc;
        }
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(W, Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) >= opts.cutoff * sv(0)) ++rank;

    const Eigen::Index dim = 3 * static_cast<Eigen::Index>(basis->size());
    const Eigen::Index nnull = ncoef - rank;
    Eigen::MatrixXd N = Eigen::MatrixXd::Zero(dim, nnull);
    for (Eigen::Index k = 0; k < nnull; ++k) {
        Eigen::VectorXd z = svd.matrixV().col(rank + k);
        for (Eigen::Index j = 0; j < ncoef; ++j) N(cols[static_cast<std::size_t>(j)], k) = z(j) / scale(j);
    }
    Eigen::MatrixXd Q = orthonormal_columns(N, 1e-12);

    SymmetryBasis out;
    out.scheme = s.name();
    out.basis = basis;
    out.u_dependent_lattice = opts.u_dependent_lattice;
    out.singular_values.assign(sv.data(), sv.data() + sv.size());
    out.samples = samples;
    out.rows = static_cast<int>(M.rows());
    out.coefficients = ncoef;
    out.rank = static_cast<int>(rank);

    auto oracle = oracle_vectors(opts, basis);
    auto spans = split_spans(Q, *basis, opts.sector_tolerance);
    int unnamed = 0;
    for (Sector sec : {Sector::Finite, Sector::Superposition}) {
        auto t = tidy(sec == Sector::Finite ? spans.finite : spans.superposition, oracle);
        for (std::size_t k = 0; k < t.vectors.size(); ++k) {
            out.fields.push_back(VectorField::from_stacked(basis, t.vectors[k]));
            out.names.push_back(t.names[k].empty() ? "Y" + std::to_string(++unnamed) : t.names[k]);
            out.sectors.push_back(sec);
        }
    }

    const double mnorm = M.norm();
    for (const auto& f : out.fields) {
        Eigen::VectorXd c = f.stacked();
        Eigen::VectorXd cf(ncoef);
        for (Eigen::Index j = 0; j < ncoef; ++j) cf(j) = c(cols[static_cast<std::size_t>(j)]);
        const double denom = mnorm * cf.norm();
        if (denom > 0) out.annihilation = std::max(out.annihilation, (M * cf).norm() / denom);
    }
    return out;
}

SectorSplit split_sectors(const std::vector<VectorField>& fields, double tol) {
    SectorSplit out;
    if (fields.empty()) return out;
    const auto& basis = fields.front().basis_ptr();
    const Eigen::Index dim = 3 * static_cast<Eigen::Index>(basis->size());
    Eigen::MatrixXd Q = orthonormal_columns(stack(fields, dim), 1e-12);
    auto spans = split_spans(Q, *basis, tol);
    for (const auto& v : tidy(spans.finite, {}).vectors) out.finite.push_back(VectorField::from_stacked(basis, v));
    for (const auto& v : tidy(spans.superposition, {}).vectors) {
        out.superposition.push_back(VectorField::from_stacked(basis, v));
    }
    return out;
}

SectorSplit split_sectors(const SymmetryBasis& b) {
    return {b.in_sector(Sector::Finite), b.in_sector(Sector::Superposition)};
}

std::pair<Eigen::VectorXd, double> project(const VectorField& v, const std::vector<VectorField>& fields) {
    const Eigen::VectorXd target = v.stacked();
    if (fields.empty()) return {Eigen::VectorXd(0), target.norm() > 0 ? 1.0 : 0.0};
    Eigen::MatrixXd F = stack(fields, target.size());
    Eigen::VectorXd c = F.colPivHouseholderQr().solve(target);
    const double tn = target.norm();
    return {c, tn > 0 ? (F * c - target).norm() / tn : 0.0};
}

StructureConstants structure_constants(const std::vector<VectorField>& fields) {
    StructureConstants out;
    const std::size_t k = fields.size();
    out.c.assign(k, std::vector<std::vector<double>>(k, std::vector<double>(k, 0.0)));
    if (k == 0) return out;
    const Eigen::Index dim = fields.front().stacked().size();
    Eigen::MatrixXd F = stack(fields, dim);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(F);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            Eigen::VectorXd b = symmetry::lie_bracket(fields[i], fields[j]).stacked();
            Eigen::VectorXd c = qr.solve(b);
            const double denom = fields[i].stacked().norm() * fields[j].stacked().norm();
            if (denom > 0) out.closure_residual = std::max(out.closure_residual, (F * c - b).norm() / denom);
            for (std::size_t m = 0; m < k; ++m) {
                double v = std::abs(c(static_cast<Eigen::Index>(m))) <= 1e-12 * c.cwiseAbs().maxCoeff()
                               ? 0.0
                               : c(static_cast<Eigen::Index>(m));
                out.c[i][j][m] = v;
                out.c[j][i][m] = -v;
            }
        }
    }
    return out;
}

std::vector<double> verify_fields(const Scheme& s, const std::vector<VectorField>& fields,
                                  lattice::SamplingOptions sampling, int count) {
    lattice::OnShellSampler sampler(s, std::move(sampling));
    const auto configs = sampler.draw(count);
    std::vector<double> worst(fields.size(), 0.0);
    for (const auto& c : configs) {
        for (std::size_t k = 0; k < fields.size(); ++k) {
            for (double r : symmetry::prolonged_action(fields[k], s, c)) worst[k] = std::max(worst[k], std::abs(r));
        }
    }
    return worst;
}

double max_principal_angle(const std::vector<VectorField>& a, const std::vector<VectorField>& b) {
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return std::acos(0.0);
    const Eigen::Index dim = a.front().stacked().size();
    Eigen::MatrixXd Qa = orthonormal_columns(stack(a, dim), 1e-12);
    Eigen::MatrixXd Qb = orthonormal_columns(stack(b, dim), 1e-12);
    if (Qa.cols() != Qb.cols()) return std::acos(0.0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Qa.transpose() * Qb);
    const double smallest = svd.singularValues().minCoeff();
    // sine form is accurate for small angles
    Eigen::MatrixXd resid = Qb - Qa * (Qa.transpose() * Qb);
    Eigen::JacobiSVD<Eigen::MatrixXd> s2(resid);
    const double sine = s2.singularValues().size() ? s2.singularValues()(0) : 0.0;
    return sine < 0.5 ? std::asin(std::min(1.0, sine)) : std::acos(std::clamp(smallest, -1.0, 1.0));
}

}  // namespace latsym::finder
