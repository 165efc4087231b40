#include "chaosforge/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

namespace chaosforge {

namespace {

struct Edge {
    double weight;
    uint32_t i, j;
};

struct Tri {
    double filt;
    uint32_t a, b, c;
};

}  // namespace

PersistenceDiagram vr_persistence(const TakensCloud& cloud, size_t max_points) {
    if (cloud.count == 0) throw InputError("vr_persistence: empty point cloud");
    if (max_points < 2) throw InputError("vr_persistence: max_points must be >= 2");

    // subsample by uniform stride
    std::vector<size_t> idx;
    if (cloud.count > max_points) {
        size_t stride = (cloud.count + max_points - 1) / max_points;
        for (size_t i = 0; i < cloud.count; i += stride) idx.push_back(i);
    } else {
        idx.resize(cloud.count);
        std::iota(idx.begin(), idx.end(), size_t{0});
    }
    const size_t n = idx.size();
    const size_t D = cloud.dim;

    PersistenceDiagram out;
    if (n == 1) {
        out.bars.push_back({0.0, 0.0, 0, true});
        out.max_filtration = 0.0;
        out.degenerate = true;
        return out;
    }

    std::vector<double> dist(n * n, 0.0);
    double max_filt = 0.0;
    for (size_t a = 0; a < n; ++a) {
        const double* pa = cloud.point(idx[a]);
        for (size_t b = a + 1; b < n; ++b) {
            const double* pb = cloud.point(idx[b]);
            double d2 = 0.0;
            for (size_t d = 0; d < D; ++d) {
                double diff = pa[d] - pb[d];
                d2 += diff * diff;
            }
            double w = std::sqrt(d2);
            dist[a * n + b] = dist[b * n + a] = w;
            if (w > max_filt) max_filt = w;
        }
    }
    out.max_filtration = max_filt;

    // H0: Prim MST, one bar per edge, plus the infinite component
    {
        std::vector<bool> in_tree(n, false);
        std::vector<double> best(n, std::numeric_limits<double>::infinity());
        in_tree[0] = true;
        for (size_t b = 1; b < n; ++b) best[b] = dist[b];
        for (size_t step = 1; step < n; ++step) {
            size_t pick = n;
            double w = std::numeric_limits<double>::infinity();
            for (size_t b = 0; b < n; ++b)
                if (!in_tree[b] && best[b] < w) {
                    w = best[b];
                    pick = b;
                }
            in_tree[pick] = true;
            out.bars.push_back({0.0, w, 0, false});
            for (size_t b = 0; b < n; ++b)
                if (!in_tree[b] && dist[pick * n + b] < best[b]) best[b] = dist[pick * n + b];
        }
        out.bars.push_back({0.0, max_filt, 0, true});
    }

    // H1: edges sorted by (weight, i, j) index the boundary rows; triangle
    // columns enter in (filtration, a, b, c) order and reduce mod 2
    std::vector<Edge> edges;
    edges.reserve(n * (n - 1) / 2);
    for (size_t a = 0; a < n; ++a)
        for (size_t b = a + 1; b < n; ++b)
            edges.push_back({dist[a * n + b], static_cast<uint32_t>(a), static_cast<uint32_t>(b)});
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
        if (x.weight != y.weight) return x.weight < y.weight;
        if (x.i != y.i) return x.i < y.i;
        return x.j < y.j;
    });
    std::vector<uint32_t> edge_id(n * n, 0);
    for (uint32_t e = 0; e < edges.size(); ++e) {
        edge_id[edges[e].i * n + edges[e].j] = e;
        edge_id[edges[e].j * n + edges[e].i] = e;
    }

    std::vector<Tri> tris;
    tris.reserve(n >= 3 ? n * (n - 1) * (n - 2) / 6 : 0);
    for (size_t a = 0; a < n; ++a)
        for (size_t b = a + 1; b < n; ++b)
            for (size_t c = b + 1; c < n; ++c) {
                double f = std::max({dist[a * n + b], dist[a * n + c], dist[b * n + c]});
                tris.push_back({f, static_cast<uint32_t>(a), static_cast<uint32_t>(b),
                                static_cast<uint32_t>(c)});
            }
    std::sort(tris.begin(), tris.end(), [](const Tri& x, const Tri& y) {
        if (x.filt != y.filt) return x.filt < y.filt;
        if (x.a != y.a) return x.a < y.a;
        if (x.b != y.b) return x.b < y.b;
        return x.c < y.c;
    });

    const size_t positive_edges = edges.size() - (n - 1);
    std::vector<std::vector<uint32_t>> stored;
    std::vector<int64_t> pivot(edges.size(), -1);  // edge id -> stored column
    std::vector<uint32_t> col, merged;
    size_t paired = 0;
    for (const Tri& t : tris) {
        if (paired == positive_edges) break;
        col = {edge_id[t.a * n + t.b], edge_id[t.a * n + t.c], edge_id[t.b * n + t.c]};
        std::sort(col.begin(), col.end());
        while (!col.empty()) {
            uint32_t low = col.back();
            if (pivot[low] < 0) break;
            // symmetric difference with the stored column sharing this low
            const auto& other = stored[pivot[low]];
            merged.clear();
            std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                          std::back_inserter(merged));
            col.swap(merged);
        }
        if (col.empty()) continue;
        uint32_t low = col.back();
        pivot[low] = static_cast<int64_t>(stored.size());
        stored.push_back(col);
        ++paired;
        double birth = edges[low].weight;
        if (t.filt > birth) out.bars.push_back({birth, t.filt, 1, false});
    }
    return out;
}

double persistent_entropy(const PersistenceDiagram& diagram, int dim) {
    std::vector<double> lifetimes;
    for (const auto& b : diagram.bars)
        if (b.dim == dim && b.death > b.birth) lifetimes.push_back(b.death - b.birth);
    if (lifetimes.size() < 2) return 0.0;
    double total = 0.0;
    for (double l : lifetimes) total += l;
    double h = 0.0;
    for (double l : lifetimes) {
        double p = l / total;
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace chaosforge
