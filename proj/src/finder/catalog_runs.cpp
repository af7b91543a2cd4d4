#include "latsym/finder/catalog_runs.hpp"

namespace latsym::finder {

std::shared_ptr<const AnsatzBasis> ansatz_for(const catalog::CatalogEntry& e, int deg_x, int deg_t, int deg_u) {
    return std::make_shared<AnsatzBasis>(deg_x, deg_t, deg_u, e.extra_basis, e.scheme.params(), e.scheme.light_cone());
}

FinderOptions options_for(const catalog::CatalogEntry& e) {
    FinderOptions o;
    o.sampling = e.sampling;
    o.oracle_params = e.scheme.params();
    for (const auto& f : e.oracle()) o.oracle.push_back({f.name, f.xi, f.tau, f.phi});
    return o;
}

}  // namespace latsym::finder
