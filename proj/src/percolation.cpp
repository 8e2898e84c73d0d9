#include "hdtorus/percolation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <thread>

#include "hdtorus/errors.hpp"
#include "hdtorus/spectral.hpp"

namespace hdtorus {

namespace {

constexpr long long kBatchSize = 64;

struct DisjointSet {
    std::vector<index_t> parent;
    std::vector<index_t> size;

    void reset(index_t v) {
        parent.resize(static_cast<size_t>(v));
        size.assign(static_cast<size_t>(v), 1);
        for (index_t i = 0; i < v; ++i) parent[static_cast<size_t>(i)] = i;
    }

    index_t find(index_t a) {
        while (parent[static_cast<size_t>(a)] != a) {
            parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
            a = parent[static_cast<size_t>(a)];
        }
        return a;
    }

    bool unite(index_t a, index_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size[static_cast<size_t>(a)] < size[static_cast<size_t>(b)]) std::swap(a, b);
        parent[static_cast<size_t>(b)] = a;
        size[static_cast<size_t>(a)] += size[static_cast<size_t>(b)];
        return true;
    }
};

// Fast displacement index y - x; digits cached for r != 2.
struct Displacement {
    const TorusSpec& spec;
    std::vector<std::int16_t> digits; // V x n
    std::vector<index_t> place;

    explicit Displacement(const TorusSpec& s) : spec(s) {
        if (spec.r == 2) return;
        digits.resize(static_cast<size_t>(spec.volume) * spec.n);
        place.resize(static_cast<size_t>(spec.n));
        index_t pl = 1;
        for (int j = 0; j < spec.n; ++j) {
            place[static_cast<size_t>(j)] = pl;
            pl *= spec.r;
        }
        for (index_t v = 0; v < spec.volume; ++v) {
            index_t rest = v;
            for (int j = 0; j < spec.n; ++j) {
                digits[static_cast<size_t>(v) * spec.n + j] = static_cast<std::int16_t>(rest % spec.r);
                rest /= spec.r;
            }
        }
    }

    index_t sub(index_t y, index_t x) const {
        if (spec.r == 2) return y ^ x;
        const std::int16_t* dy = &digits[static_cast<size_t>(y) * spec.n];
        const std::int16_t* dx = &digits[static_cast<size_t>(x) * spec.n];
        index_t out = 0;
        for (int j = 0; j < spec.n; ++j) {
            int d = dy[j] - dx[j];
            if (d < 0) d += spec.r;
            out += place[static_cast<size_t>(j)] * d;
        }
        return out;
    }
};

struct BatchAcc {
    long long samples = 0;
    std::vector<double> tau_counts;  // ordered-pair counts per displacement
    std::vector<double> pi0_counts;
    double chi_sum = 0.0;
    double cmax_sum = 0.0;
    std::vector<double> tail_sums;
    std::vector<index_t> cmax_list;
};

struct Scratch {
    DisjointSet clusters;
    DisjointSet two_edge;
    std::vector<index_t> occ_edges;
    std::vector<index_t> bucket_offset, bucket_fill, members;
    // occupied-subgraph adjacency + iterative bridge DFS state
    std::vector<int> head, nxt, to_vertex, edge_of;
    std::vector<int> disc, low;
    std::vector<std::uint8_t> is_bridge;
    std::vector<int> stack_vertex, stack_edge, stack_iter;
};

struct TailGrid {
    std::vector<index_t> ks;
    explicit TailGrid(index_t v) {
        for (index_t k = 1; k <= v; k *= 2) ks.push_back(k);
        if (ks.back() != v) ks.push_back(v);
    }
};

void accumulate_pairs(const Displacement& disp, const std::vector<index_t>& members,
                      index_t begin, index_t end, std::vector<double>& counts) {
    for (index_t i = begin; i < end; ++i) {
        const index_t x = members[static_cast<size_t>(i)];
        for (index_t j = begin; j < end; ++j)
            counts[static_cast<size_t>(disp.sub(members[static_cast<size_t>(j)], x))] += 1.0;
    }
}

// Buckets vertices by root; returns cluster slices [offset[i], offset[i+1]).
void bucket_by_root(const std::vector<index_t>& root, index_t v, Scratch& s,
                    std::vector<index_t>& slice_bounds) {
    s.bucket_offset.assign(static_cast<size_t>(v) + 1, 0);
    for (index_t x = 0; x < v; ++x) s.bucket_offset[static_cast<size_t>(root[static_cast<size_t>(x)]) + 1]++;
    for (index_t i = 0; i < v; ++i) s.bucket_offset[static_cast<size_t>(i) + 1] += s.bucket_offset[static_cast<size_t>(i)];
    s.bucket_fill.assign(s.bucket_offset.begin(), s.bucket_offset.end());
    s.members.resize(static_cast<size_t>(v));
    for (index_t x = 0; x < v; ++x)
        s.members[static_cast<size_t>(s.bucket_fill[static_cast<size_t>(root[static_cast<size_t>(x)])]++)] = x;
    slice_bounds.clear();
    for (index_t i = 0; i <= v; ++i) {
        if (slice_bounds.empty() || s.bucket_offset[static_cast<size_t>(i)] != slice_bounds.back())
            slice_bounds.push_back(s.bucket_offset[static_cast<size_t>(i)]);
    }
}

// Tarjan low-link bridge pass over the occupied subgraph, iterative.
void find_bridges(const TorusSpec& spec, const std::vector<std::pair<index_t, index_t>>& edges,
                  Scratch& s) {
    const index_t v = spec.volume;
    const int occ = static_cast<int>(s.occ_edges.size());
    s.head.assign(static_cast<size_t>(v), -1);
    s.nxt.resize(static_cast<size_t>(occ) * 2);
    s.to_vertex.resize(static_cast<size_t>(occ) * 2);
    s.edge_of.resize(static_cast<size_t>(occ) * 2);
    int slot = 0;
    for (int e = 0; e < occ; ++e) {
        const auto& [a, b] = edges[static_cast<size_t>(s.occ_edges[static_cast<size_t>(e)])];
        s.to_vertex[static_cast<size_t>(slot)] = static_cast<int>(b);
        s.edge_of[static_cast<size_t>(slot)] = e;
        s.nxt[static_cast<size_t>(slot)] = s.head[static_cast<size_t>(a)];
        s.head[static_cast<size_t>(a)] = slot++;
        s.to_vertex[static_cast<size_t>(slot)] = static_cast<int>(a);
        s.edge_of[static_cast<size_t>(slot)] = e;
        s.nxt[static_cast<size_t>(slot)] = s.head[static_cast<size_t>(b)];
        s.head[static_cast<size_t>(b)] = slot++;
    }
    s.disc.assign(static_cast<size_t>(v), 0);
    s.low.assign(static_cast<size_t>(v), 0);
    s.is_bridge.assign(static_cast<size_t>(occ), 0);
    int tick = 0;

    for (index_t start = 0; start < v; ++start) {
        if (s.disc[static_cast<size_t>(start)] != 0) continue;
        s.stack_vertex.clear();
        s.stack_edge.clear();
        s.stack_iter.clear();
        s.stack_vertex.push_back(static_cast<int>(start));
        s.stack_edge.push_back(-1);
        s.stack_iter.push_back(s.head[static_cast<size_t>(start)]);
        s.disc[static_cast<size_t>(start)] = s.low[static_cast<size_t>(start)] = ++tick;
        while (!s.stack_vertex.empty()) {
            int x = s.stack_vertex.back();
            int it = s.stack_iter.back();
            if (it == -1) {
                int via = s.stack_edge.back();
                s.stack_vertex.pop_back();
                s.stack_edge.pop_back();
                s.stack_iter.pop_back();
                if (!s.stack_vertex.empty()) {
                    int parent = s.stack_vertex.back();
                    s.low[static_cast<size_t>(parent)] = std::min(s.low[static_cast<size_t>(parent)], s.low[static_cast<size_t>(x)]);
                    if (s.low[static_cast<size_t>(x)] > s.disc[static_cast<size_t>(parent)])
                        s.is_bridge[static_cast<size_t>(s.edge_of[static_cast<size_t>(via)])] = 1;
                }
                continue;
            }
            s.stack_iter.back() = s.nxt[static_cast<size_t>(it)];
            int y = s.to_vertex[static_cast<size_t>(it)];
            int e = s.edge_of[static_cast<size_t>(it)];
            if (s.disc[static_cast<size_t>(y)] == 0) {
                s.disc[static_cast<size_t>(y)] = s.low[static_cast<size_t>(y)] = ++tick;
                s.stack_vertex.push_back(y);
                s.stack_edge.push_back(it);
                s.stack_iter.push_back(s.head[static_cast<size_t>(y)]);
            } else if (s.stack_edge.back() == -1 ||
                       e != s.edge_of[static_cast<size_t>(s.stack_edge.back())]) {
                s.low[static_cast<size_t>(x)] = std::min(s.low[static_cast<size_t>(x)], s.disc[static_cast<size_t>(y)]);
            }
        }
    }
}

void run_batch(const TorusSpec& spec, double p, const McOptions& opts,
               const std::vector<std::pair<index_t, index_t>>& edges, const Displacement& disp,
               const TailGrid& grid, long long first_sample, long long count, Scratch& s,
               BatchAcc& acc) {
    const index_t v = spec.volume;
    acc.samples = count;
    if (opts.two_point) acc.tau_counts.assign(static_cast<size_t>(v), 0.0);
    if (opts.two_point && opts.double_connectivity) acc.pi0_counts.assign(static_cast<size_t>(v), 0.0);
    acc.tail_sums.assign(grid.ks.size(), 0.0);
    std::vector<index_t> slices;

    for (long long sample = first_sample; sample < first_sample + count; ++sample) {
        RngStream rng(opts.seed, static_cast<std::uint64_t>(sample));
        s.clusters.reset(v);
        s.occ_edges.clear();
        for (size_t e = 0; e < edges.size(); ++e) {
            const bool occ = rng.next_uniform() < p;
            if (!occ) continue;
            s.occ_edges.push_back(static_cast<index_t>(e));
            s.clusters.unite(edges[e].first, edges[e].second);
        }

        std::vector<index_t> root(static_cast<size_t>(v));
        for (index_t x = 0; x < v; ++x) root[static_cast<size_t>(x)] = s.clusters.find(x);

        bucket_by_root(root, v, s, slices);
        double sq_sum = 0.0;
        index_t cmax = 1;
        for (size_t c = 0; c + 1 < slices.size(); ++c) {
            const index_t begin = slices[c], end = slices[c + 1];
            const index_t sz = end - begin;
            sq_sum += static_cast<double>(sz) * static_cast<double>(sz);
            cmax = std::max(cmax, sz);
            for (size_t g = 0; g < grid.ks.size() && grid.ks[g] <= sz; ++g)
                acc.tail_sums[g] += static_cast<double>(sz);
            if (opts.two_point) accumulate_pairs(disp, s.members, begin, end, acc.tau_counts);
        }
        acc.chi_sum += sq_sum / static_cast<double>(v);
        acc.cmax_sum += static_cast<double>(cmax);
        if (opts.keep_cmax_samples) acc.cmax_list.push_back(cmax);

        if (opts.two_point && opts.double_connectivity) {
            find_bridges(spec, edges, s);
            s.two_edge.reset(v);
            for (size_t e = 0; e < s.occ_edges.size(); ++e) {
                if (s.is_bridge[e]) continue;
                const auto& edge = edges[static_cast<size_t>(s.occ_edges[e])];
                s.two_edge.unite(edge.first, edge.second);
            }
            for (index_t x = 0; x < v; ++x) root[static_cast<size_t>(x)] = s.two_edge.find(x);
            bucket_by_root(root, v, s, slices);
            for (size_t c = 0; c + 1 < slices.size(); ++c)
                accumulate_pairs(disp, s.members, slices[c], slices[c + 1], acc.pi0_counts);
        }
    }
}

// stderr of the grand mean from per-batch means, batch sizes n_b
double batch_stderr(const std::vector<double>& batch_means, const std::vector<long long>& sizes,
                    long long total, double grand_mean) {
    const size_t b = batch_means.size();
    if (b < 2) return 0.0;
    double acc = 0.0;
    for (size_t i = 0; i < b; ++i) {
        const double w = static_cast<double>(sizes[i]) / static_cast<double>(total);
        const double d = batch_means[i] - grand_mean;
        acc += w * w * d * d;
    }
    return std::sqrt(acc * static_cast<double>(b) / static_cast<double>(b - 1));
}

} // namespace

PercolationSample sample_configuration(const TorusSpec& spec, double p, RngStream& rng) {
    if (p < 0.0 || p > 1.0) throw DomainError("sample_configuration: p must lie in [0,1]");
    auto edges = edge_list(spec);
    PercolationSample out;
    out.occupied.resize(edges.size());
    DisjointSet ds;
    ds.reset(spec.volume);
    for (size_t e = 0; e < edges.size(); ++e) {
        out.occupied[e] = rng.next_uniform() < p;
        if (out.occupied[e]) ds.unite(edges[e].first, edges[e].second);
    }
    out.cluster_root.resize(static_cast<size_t>(spec.volume));
    out.cluster_size.resize(static_cast<size_t>(spec.volume));
    for (index_t x = 0; x < spec.volume; ++x) {
        out.cluster_root[static_cast<size_t>(x)] = ds.find(x);
        out.cluster_size[static_cast<size_t>(x)] = ds.size[static_cast<size_t>(ds.find(x))];
    }
    return out;
}

McResult estimate_observables(const TorusSpec& spec, double p, const McOptions& opts) {
    if (p < 0.0 || p > 1.0) throw DomainError("estimate_observables: p must lie in [0,1]");
    if (opts.samples < 1) throw DomainError("estimate_observables: samples must be >= 1");

    const index_t v = spec.volume;
    const auto edges = edge_list(spec);
    const Displacement disp(spec);
    const TailGrid grid(v);

    const long long batches = (opts.samples + kBatchSize - 1) / kBatchSize;
    std::vector<BatchAcc> acc(static_cast<size_t>(batches));

    int workers = opts.workers > 0 ? opts.workers
                                   : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = static_cast<int>(std::min<long long>(workers, batches));

    std::atomic<long long> next_batch{0};
    auto work = [&]() {
        Scratch scratch;
        for (;;) {
            const long long b = next_batch.fetch_add(1);
            if (b >= batches) break;
            const long long first = b * kBatchSize;
            const long long count = std::min<long long>(kBatchSize, opts.samples - first);
            run_batch(spec, p, opts, edges, disp, grid, first, count, scratch,
                      acc[static_cast<size_t>(b)]);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    // merge in batch order
    McResult out;
    out.two_point.samples = opts.samples;
    out.two_point.p = p;
    out.two_point.seed = opts.seed;

    std::vector<long long> sizes(static_cast<size_t>(batches));
    for (size_t b = 0; b < acc.size(); ++b) sizes[b] = acc[b].samples;
    const double total = static_cast<double>(opts.samples);

    auto merge_scalar = [&](auto per_batch_sum) {
        double grand = 0.0;
        std::vector<double> means(acc.size());
        for (size_t b = 0; b < acc.size(); ++b) {
            const double s = per_batch_sum(acc[b]);
            grand += s;
            means[b] = s / static_cast<double>(acc[b].samples);
        }
        grand /= total;
        return std::pair<double, double>(grand, batch_stderr(means, sizes, opts.samples, grand));
    };

    std::tie(out.clusters.chi, out.clusters.chi_se) =
        merge_scalar([](const BatchAcc& a) { return a.chi_sum; });
    std::tie(out.clusters.cmax_mean, out.clusters.cmax_se) =
        merge_scalar([](const BatchAcc& a) { return a.cmax_sum; });

    out.clusters.tail_k = grid.ks;
    out.clusters.tail.resize(grid.ks.size());
    out.clusters.tail_se.resize(grid.ks.size());
    for (size_t g = 0; g < grid.ks.size(); ++g) {
        auto [mean, se] = merge_scalar(
            [&](const BatchAcc& a) { return a.tail_sums[g] / static_cast<double>(v); });
        out.clusters.tail[g] = mean;
        out.clusters.tail_se[g] = se;
    }

    if (opts.keep_cmax_samples)
        for (const auto& a : acc)
            out.clusters.cmax_samples.insert(out.clusters.cmax_samples.end(), a.cmax_list.begin(),
                                             a.cmax_list.end());

    auto merge_field = [&](auto counts_of, std::vector<double>& mean_out, std::vector<double>& se_out) {
        mean_out.assign(static_cast<size_t>(v), 0.0);
        se_out.assign(static_cast<size_t>(v), 0.0);
        const double denom = total * static_cast<double>(v);
        for (const auto& a : acc)
            for (index_t x = 0; x < v; ++x) mean_out[static_cast<size_t>(x)] += counts_of(a)[static_cast<size_t>(x)];
        for (index_t x = 0; x < v; ++x) mean_out[static_cast<size_t>(x)] /= denom;
        if (acc.size() >= 2) {
            const double bessel =
                static_cast<double>(acc.size()) / static_cast<double>(acc.size() - 1);
            for (const auto& a : acc) {
                const double w = static_cast<double>(a.samples) / total;
                for (index_t x = 0; x < v; ++x) {
                    const double m =
                        counts_of(a)[static_cast<size_t>(x)] /
                        (static_cast<double>(a.samples) * static_cast<double>(v));
                    const double d = m - mean_out[static_cast<size_t>(x)];
                    se_out[static_cast<size_t>(x)] += w * w * d * d;
                }
            }
            for (index_t x = 0; x < v; ++x)
                se_out[static_cast<size_t>(x)] = std::sqrt(se_out[static_cast<size_t>(x)] * bessel);
        }
    };

    if (opts.two_point) {
        merge_field([](const BatchAcc& a) -> const std::vector<double>& { return a.tau_counts; },
                    out.two_point.tau, out.two_point.stderr_);
        out.two_point.tau = sanitize_two_point(spec, std::move(out.two_point.tau));
        if (opts.double_connectivity) {
            merge_field([](const BatchAcc& a) -> const std::vector<double>& { return a.pi0_counts; },
                        out.pi0, out.pi0_se);
            out.pi0[0] -= 1.0; // P(0 <=> 0) = 1 by convention; Pi0 subtracts the diagonal
        }
    }
    return out;
}

std::vector<double> sanitize_two_point(const TorusSpec& spec, std::vector<double> tau) {
    for (index_t x = 0; x < spec.volume; ++x) {
        index_t nx = spec.vertex_neg(x);
        if (nx < x) continue;
        double avg = 0.5 * (tau[static_cast<size_t>(x)] + tau[static_cast<size_t>(nx)]);
        avg = std::min(1.0, std::max(0.0, avg));
        tau[static_cast<size_t>(x)] = tau[static_cast<size_t>(nx)] = avg;
    }
    tau[0] = 1.0;
    return tau;
}

} // namespace hdtorus
