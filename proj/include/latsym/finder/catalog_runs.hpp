#pragma once

#include <memory>

#include "latsym/catalog/catalog.hpp"
#include "latsym/finder/finder.hpp"

namespace latsym::finder {

/// Ansatz of the given degrees plus the entry's registered functions.
std::shared_ptr<const AnsatzBasis> ansatz_for(const catalog::CatalogEntry& e, int deg_x = 2, int deg_t = 2,
                                              int deg_u = 1);

/// Finder options carrying the entry's sampling ranges, admissibility and oracle.
FinderOptions options_for(const catalog::CatalogEntry& e);

}  // namespace latsym::finder
