#include "hdtorus/torus.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hdtorus/errors.hpp"

namespace hdtorus {

namespace {

constexpr index_t kMaxVolume = index_t{1} << 56;

index_t checked_pow(index_t base, int exp) {
    index_t out = 1;
    for (int i = 0; i < exp; ++i) {
        if (out > kMaxVolume / base)
            throw SizeError("torus volume " + std::to_string(base) + "^" +
                            std::to_string(exp) + " exceeds addressable range");
        out *= base;
    }
    return out;
}

} // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::NearestNeighbor: return "nearest_neighbor";
        case Family::Hamming: return "hamming";
        case Family::SpreadOut: return "spread_out";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    if (name == "nearest_neighbor") return Family::NearestNeighbor;
    if (name == "hamming") return Family::Hamming;
    if (name == "spread_out") return Family::SpreadOut;
    throw ConfigError("unknown torus family '" + name +
                      "' (expected nearest_neighbor, hamming or spread_out)");
}

TorusSpec TorusSpec::make(Family family, int r, int n, int L) {
    if (r < 2) throw ConfigError("torus width r must be >= 2, got " + std::to_string(r));
    if (n < 1) throw ConfigError("torus dimension n must be >= 1, got " + std::to_string(n));
    TorusSpec spec;
    spec.family = family;
    spec.r = r;
    spec.n = n;
    spec.volume = checked_pow(r, n);
    switch (family) {
        case Family::NearestNeighbor:
            spec.L = 0;
            spec.degree = (r >= 3) ? 2 * static_cast<index_t>(n) : n;
            break;
        case Family::Hamming:
            spec.L = 0;
            spec.degree = static_cast<index_t>(r - 1) * n;
            break;
        case Family::SpreadOut:
            if (L < 1) throw ConfigError("spread-out range L must be >= 1, got " + std::to_string(L));
            if (r < 2 * L + 1)
                throw ConfigError("spread-out torus requires r >= 2L+1, got r=" +
                                  std::to_string(r) + ", L=" + std::to_string(L));
            spec.L = L;
            spec.degree = checked_pow(2 * L + 1, n) - 1;
            break;
    }
    return spec;
}

std::vector<int> TorusSpec::coords(index_t v) const {
    std::vector<int> out(n);
    for (int j = 0; j < n; ++j) {
        out[j] = static_cast<int>(v % r);
        v /= r;
    }
    return out;
}

index_t TorusSpec::index_of(const std::vector<int>& coords) const {
    index_t out = 0;
    for (int j = n - 1; j >= 0; --j) {
        int c = coords[j] % r;
        if (c < 0) c += r;
        out = out * r + c;
    }
    return out;
}

index_t TorusSpec::vertex_add(index_t a, index_t b) const {
    if (r == 2) return a ^ b;
    index_t out = 0, place = 1;
    for (int j = 0; j < n; ++j) {
        int s = static_cast<int>(a % r) + static_cast<int>(b % r);
        if (s >= r) s -= r;
        out += place * s;
        a /= r;
        b /= r;
        place *= r;
    }
    return out;
}

index_t TorusSpec::vertex_sub(index_t a, index_t b) const {
    if (r == 2) return a ^ b;
    index_t out = 0, place = 1;
    for (int j = 0; j < n; ++j) {
        int s = static_cast<int>(a % r) - static_cast<int>(b % r);
        if (s < 0) s += r;
        out += place * s;
        a /= r;
        b /= r;
        place *= r;
    }
    return out;
}

index_t TorusSpec::vertex_neg(index_t a) const {
    if (r == 2) return a;
    index_t out = 0, place = 1;
    for (int j = 0; j < n; ++j) {
        int c = static_cast<int>(a % r);
        out += place * (c == 0 ? 0 : r - c);
        a /= r;
        place *= r;
    }
    return out;
}

double dual_component(int digit, int r) {
    int folded = (digit <= r / 2) ? digit : digit - r;
    return 2.0 * M_PI * folded / r;
}

double dual_norm_sq(const TorusSpec& spec, index_t k) {
    double out = 0.0;
    for (int j = 0; j < spec.n; ++j) {
        double c = dual_component(static_cast<int>(k % spec.r), spec.r);
        out += c * c;
        k /= spec.r;
    }
    return out;
}

int nonzero_components(const TorusSpec& spec, index_t k) {
    int m = 0;
    for (int j = 0; j < spec.n; ++j) {
        m += (k % spec.r) != 0;
        k /= spec.r;
    }
    return m;
}

double dual_dot(const TorusSpec& spec, index_t k, index_t x) {
    index_t acc = 0;
    for (int j = 0; j < spec.n; ++j) {
        acc += (k % spec.r) * (x % spec.r) % spec.r;
        k /= spec.r;
        x /= spec.r;
    }
    return 2.0 * M_PI * static_cast<double>(acc % spec.r) / spec.r;
}

std::vector<index_t> generators(const TorusSpec& spec) {
    std::vector<index_t> out;
    out.reserve(static_cast<size_t>(spec.degree));
    index_t place = 1;
    switch (spec.family) {
        case Family::NearestNeighbor:
            for (int j = 0; j < spec.n; ++j) {
                out.push_back(place);
                if (spec.r >= 3) out.push_back(place * (spec.r - 1));
                place *= spec.r;
            }
            break;
        case Family::Hamming:
            for (int j = 0; j < spec.n; ++j) {
                for (int s = 1; s < spec.r; ++s) out.push_back(place * s);
                place *= spec.r;
            }
            break;
        case Family::SpreadOut: {
            // offsets with every coordinate in [-L, L], excluding 0
            std::vector<int> digit(spec.n, -spec.L);
            while (true) {
                bool zero = std::all_of(digit.begin(), digit.end(), [](int d) { return d == 0; });
                if (!zero) {
                    index_t idx = 0, pl = 1;
                    for (int j = 0; j < spec.n; ++j) {
                        int c = digit[j] < 0 ? digit[j] + spec.r : digit[j];
                        idx += pl * c;
                        pl *= spec.r;
                    }
                    out.push_back(idx);
                }
                int j = 0;
                for (; j < spec.n; ++j) {
                    if (++digit[j] <= spec.L) break;
                    digit[j] = -spec.L;
                }
                if (j == spec.n) break;
            }
            break;
        }
    }
    return out;
}

std::vector<index_t> neighbors(const TorusSpec& spec, index_t x) {
    std::vector<index_t> out;
    auto gens = generators(spec);
    out.reserve(gens.size());
    for (index_t g : gens) out.push_back(spec.vertex_add(x, g));
    return out;
}

std::vector<double> step_distribution(const TorusSpec& spec) {
    if (spec.volume > (index_t{1} << 27))
        throw SizeError("step distribution field of size " + std::to_string(spec.volume) +
                        " too large to materialize; use the streaming dual sweep");
    std::vector<double> d(static_cast<size_t>(spec.volume), 0.0);
    const double w = 1.0 / static_cast<double>(spec.degree);
    for (index_t g : generators(spec)) d[static_cast<size_t>(g)] = w;
    return d;
}

bool verify_symmetry(const TorusSpec& spec) {
    auto gens = generators(spec);
    std::set<index_t> support(gens.begin(), gens.end());
    for (index_t g : gens)
        if (support.count(spec.vertex_neg(g)) == 0) return false;
    return true;
}

bool is_symmetric(const TorusSpec& spec, const std::vector<double>& f) {
    for (index_t x = 0; x < static_cast<index_t>(f.size()); ++x)
        if (f[static_cast<size_t>(x)] != f[static_cast<size_t>(spec.vertex_neg(x))]) return false;
    return true;
}

index_t edge_count(const TorusSpec& spec) {
    return spec.volume * spec.degree / 2;
}

std::vector<std::pair<index_t, index_t>> edge_list(const TorusSpec& spec) {
    const index_t count = edge_count(spec);
    if (count > (index_t{1} << 27))
        throw SizeError("edge list of size " + std::to_string(count) + " too large to materialize");

    // canonical half of the generating set: one offset per {s, -s} pair
    auto gens = generators(spec);
    std::vector<std::pair<index_t, bool>> half; // (offset, self_inverse)
    for (index_t g : gens) {
        index_t ng = spec.vertex_neg(g);
        if (g < ng)
            half.emplace_back(g, false);
        else if (g == ng)
            half.emplace_back(g, true);
    }

    std::vector<std::pair<index_t, index_t>> edges;
    edges.reserve(static_cast<size_t>(count));
    for (index_t x = 0; x < spec.volume; ++x) {
        for (const auto& [g, self_inverse] : half) {
            index_t y = spec.vertex_add(x, g);
            if (self_inverse && x > y) continue;
            edges.emplace_back(x, y);
        }
    }
    return edges;
}

} // namespace hdtorus
