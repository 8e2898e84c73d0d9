#include "hdtorus/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "hdtorus/errors.hpp"
#include "hdtorus/spectral.hpp"

namespace hdtorus {

namespace {

constexpr int kMaxBonds = 24;
constexpr int kMaxVerts = 64; // V <= 2 * bonds for any graph with min degree 1

struct SmallDsu {
    index_t parent[kMaxVerts];
    index_t size[kMaxVerts];
    void reset(index_t v) {
        for (index_t i = 0; i < v; ++i) {
            parent[i] = i;
            size[i] = 1;
        }
    }
    index_t find(index_t a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    void unite(index_t a, index_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[a] < size[b]) std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
    }
};

// Tarjan bridge pass over the occupied subgraph of a tiny graph.
struct BridgeFinder {
    const std::vector<std::pair<index_t, index_t>>& edges;
    index_t v;
    std::uint32_t mask = 0;
    int adj_head[kMaxVerts];
    int adj_next[2 * kMaxBonds];
    int adj_to[2 * kMaxBonds];
    int adj_edge[2 * kMaxBonds];
    int disc[kMaxVerts], low[kMaxVerts];
    int tick = 0;
    std::uint32_t bridges = 0; // bitmask over edge ids

    explicit BridgeFinder(const std::vector<std::pair<index_t, index_t>>& e, index_t vol)
        : edges(e), v(vol) {}

    void run(std::uint32_t occupied) {
        mask = occupied;
        bridges = 0;
        tick = 0;
        for (index_t i = 0; i < v; ++i) adj_head[i] = -1;
        int slot = 0;
        for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
            if (!(mask >> e & 1u)) continue;
            const auto& [a, b] = edges[static_cast<size_t>(e)];
            adj_to[slot] = static_cast<int>(b);
            adj_edge[slot] = e;
            adj_next[slot] = adj_head[a];
            adj_head[a] = slot++;
            adj_to[slot] = static_cast<int>(a);
            adj_edge[slot] = e;
            adj_next[slot] = adj_head[b];
            adj_head[b] = slot++;
        }
        for (index_t i = 0; i < v; ++i) disc[i] = 0;
        for (index_t i = 0; i < v; ++i)
            if (disc[i] == 0) dfs(static_cast<int>(i), -1);
    }

    void dfs(int x, int via_edge) {
        disc[x] = low[x] = ++tick;
        for (int it = adj_head[x]; it != -1; it = adj_next[it]) {
            const int e = adj_edge[it];
            if (e == via_edge) continue;
            const int y = adj_to[it];
            if (disc[y] == 0) {
                dfs(y, e);
                low[x] = std::min(low[x], low[y]);
                if (low[y] > disc[x]) bridges |= 1u << e;
            } else {
                low[x] = std::min(low[x], disc[y]);
            }
        }
    }
};

} // namespace

ExactReport exact_observables(const TorusSpec& spec, double p) {
    if (p < 0.0 || p > 1.0) throw DomainError("exact_observables: p must lie in [0,1]");
    const auto edges = edge_list(spec);
    const int bonds = static_cast<int>(edges.size());
    if (bonds > kMaxBonds)
        throw SizeError("exact_observables: " + std::to_string(bonds) + " bonds exceed the cap of " +
                        std::to_string(kMaxBonds) + " (2^" + std::to_string(bonds) + " configurations)");
    const index_t v = spec.volume;

    ExactReport report;
    report.p = p;
    report.tau.assign(static_cast<size_t>(v), 0.0);
    report.pi0.assign(static_cast<size_t>(v), 0.0);
    report.tail.assign(static_cast<size_t>(v) + 1, 0.0);

    std::vector<double> weight(static_cast<size_t>(bonds) + 1);
    for (int occ = 0; occ <= bonds; ++occ)
        weight[static_cast<size_t>(occ)] = std::pow(p, occ) * std::pow(1.0 - p, bonds - occ);

    // displacement table; V is tiny
    std::vector<index_t> sub(static_cast<size_t>(v) * static_cast<size_t>(v));
    for (index_t x = 0; x < v; ++x)
        for (index_t y = 0; y < v; ++y)
            sub[static_cast<size_t>(x) * static_cast<size_t>(v) + static_cast<size_t>(y)] =
                spec.vertex_sub(y, x);

    SmallDsu clusters, two_edge;
    BridgeFinder bridge(edges, v);
    index_t root[kMaxVerts];
    const std::uint32_t configs = 1u << bonds;

    // Gray-code order flips one bond per step; connectivity is still rebuilt
    // from scratch each time, the code only fixes the enumeration order.
    std::uint32_t mask = 0;
    for (std::uint32_t step = 0;; ++step) {
        const double w = weight[static_cast<size_t>(__builtin_popcount(mask))];

        clusters.reset(v);
        for (int e = 0; e < bonds; ++e)
            if (mask >> e & 1u)
                clusters.unite(edges[static_cast<size_t>(e)].first, edges[static_cast<size_t>(e)].second);

        double sq = 0.0;
        index_t cmax = 1;
        for (index_t x = 0; x < v; ++x) {
            root[x] = clusters.find(x);
            if (root[x] != x) continue;
            const index_t sz = clusters.size[x];
            sq += static_cast<double>(sz) * static_cast<double>(sz);
            cmax = std::max(cmax, sz);
            for (index_t k = 1; k <= sz; ++k)
                report.tail[static_cast<size_t>(k)] += w * static_cast<double>(sz) / static_cast<double>(v);
        }
        report.chi += w * sq / static_cast<double>(v);
        report.cmax_mean += w * static_cast<double>(cmax);
        for (index_t x = 0; x < v; ++x) {
            const index_t* row = &sub[static_cast<size_t>(x) * static_cast<size_t>(v)];
            for (index_t y = 0; y < v; ++y)
                if (root[x] == root[y]) report.tau[static_cast<size_t>(row[y])] += w / static_cast<double>(v);
        }

        // double connections: drop bridges, then component membership
        bridge.run(mask);
        two_edge.reset(v);
        for (int e = 0; e < bonds; ++e)
            if ((mask >> e & 1u) && !(bridge.bridges >> e & 1u))
                two_edge.unite(edges[static_cast<size_t>(e)].first, edges[static_cast<size_t>(e)].second);
        for (index_t x = 0; x < v; ++x) root[x] = two_edge.find(x);
        for (index_t x = 0; x < v; ++x) {
            const index_t* row = &sub[static_cast<size_t>(x) * static_cast<size_t>(v)];
            for (index_t y = 0; y < v; ++y)
                if (root[x] == root[y]) report.pi0[static_cast<size_t>(row[y])] += w / static_cast<double>(v);
        }

        if (step + 1 == configs) break;
        mask ^= 1u << __builtin_ctz(step + 1);
    }

    report.pi0[0] -= 1.0;

    auto tau_hat = dft(spec, report.tau);
    KahanSum nabla;
    for (index_t k = 0; k < v; ++k) {
        const double t = tau_hat[static_cast<size_t>(k)];
        nabla.add(t * t * t);
    }
    report.nabla0 = nabla.value() / static_cast<double>(v);
    return report;
}

} // namespace hdtorus
