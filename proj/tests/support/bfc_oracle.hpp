#pragma once

#include "topoal/graph.hpp"

// Independent exhaustive Balanced Forman Curvature oracle. Materializes the
// neighbor sets, the triangle set, both square sets, and the 4-cycle
// multiplicity by explicit std::set construction, one containment test at a
// time. Deliberately naive (O(n^3)-ish per pair); kept independent of the
// optimized production path it is used to check.
namespace oracle {

struct Counts {
    int tri = 0;
    int sq_i = 0;
    int sq_j = 0;
    int gamma_max = 0;
};

Counts count_neighborhoods(const topoal::Adjacency& adj, int i, int j);
double bfc(const topoal::Adjacency& adj, int i, int j);

} // namespace oracle
