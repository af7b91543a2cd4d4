#include "latsym/symmetry/prolong.hpp"

#include <vector>

namespace latsym::symmetry {

namespace {

template <class F>
ResidualVector prolong(const F& field, const Scheme& s, const StencilConfiguration& c) {
    std::vector<Point> at(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        const auto& p = c.point(k);
        at[k] = field(p[0], p[1], p[2]);
    }
    ResidualVector out{};
    std::vector<double> g;
    for (int a = 0; a < lattice::kResidualCount; ++a) {
        s.residual_gradient(a, c, g);
        const auto& refs = s.residual(a).refs();
        double sum = 0.0;
        for (std::size_t q = 0; q < refs.size(); ++q) {
            const int k = c.index_of(refs[q].at);
            sum += g[q] * at[static_cast<std::size_t>(k)][static_cast<std::size_t>(refs[q].var)];
        }
        out[static_cast<std::size_t>(a)] = sum;
    }
    return out;
}

}  // namespace

ResidualVector prolonged_action(const FieldFunction& v, const Scheme& s, const StencilConfiguration& c) {
    return prolong(v, s, c);
}

ResidualVector prolonged_action(const VectorField& v, const Scheme& s, const StencilConfiguration& c) {
    return prolong(v, s, c);
}

ResidualVector prolonged_action(const ExpressionField& v, const Scheme& s, const StencilConfiguration& c) {
    return prolong(v, s, c);
}

Eigen::MatrixXd invariance_rows(const AnsatzBasis& basis, const Scheme& s, const StencilConfiguration& c) {
    const auto n = static_cast<Eigen::Index>(basis.size());
    std::vector<std::vector<double>> vals(c.size(), std::vector<double>(basis.size()));
    for (std::size_t k = 0; k < c.size(); ++k) {
        const auto& p = c.point(k);
        basis.values(p[0], p[1], p[2], vals[k]);
    }
    Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(lattice::kResidualCount, 3 * n);
    std::vector<double> g;
    for (int a = 0; a < lattice::kResidualCount; ++a) {
        s.residual_gradient(a, c, g);
        const auto& refs = s.residual(a).refs();
        for (std::size_t q = 0; q < refs.size(); ++q) {
            const auto k = static_cast<std::size_t>(c.index_of(refs[q].at));
            const Eigen::Index block = static_cast<Eigen::Index>(refs[q].var) * n;
            for (Eigen::Index j = 0; j < n; ++j) rows(a, block + j) += g[q] * vals[k][static_cast<std::size_t>(j)];
        }
    }
    return rows;
}

}  // namespace latsym::symmetry
