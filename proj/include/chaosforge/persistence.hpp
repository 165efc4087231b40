#pragma once
#include <cstddef>
#include <vector>

#include "chaosforge/chaos.hpp"
#include "chaosforge/errors.hpp"

namespace chaosforge {

struct PersistenceBar {
    double birth = 0.0;
    double death = 0.0;
    int dim = 0;  // 0 or 1
    bool infinite = false;
};

struct PersistenceDiagram {
    std::vector<PersistenceBar> bars;
    double max_filtration = 0.0;
    bool degenerate = false;  // single-point cloud
};

// Vietoris-Rips persistence on a point cloud, H0 and H1.
// Clouds larger than max_points are subsampled by uniform stride.
// H0 from minimum-spanning-tree edges; the infinite component is
// recorded with death = max_filtration (the maximum pairwise distance).
// H1 by mod-2 boundary-matrix column reduction over the flag complex.
PersistenceDiagram vr_persistence(const TakensCloud& cloud, size_t max_points = 256);

// Shannon entropy of normalized positive bar lifetimes in the given dim.
double persistent_entropy(const PersistenceDiagram& diagram, int dim);

}  // namespace chaosforge
