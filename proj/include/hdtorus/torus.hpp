#ifndef HDTORUS_TORUS_HPP
#define HDTORUS_TORUS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace hdtorus {

using index_t = std::int64_t;

enum class Family { NearestNeighbor, Hamming, SpreadOut };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// Vertex set (Z_r)^n with mixed-radix little-endian indexing: coordinate 0 is
// the least significant digit, so index = sum_j x_j r^j. The dual torus uses
// the same indexing, with component j of dual index k equal to 2*pi*k_j/r
// folded into (-pi, pi].
struct TorusSpec {
    Family family = Family::NearestNeighbor;
    int r = 2;
    int n = 1;
    int L = 0; // SpreadOut range
    index_t volume = 0;
    index_t degree = 0;

    static TorusSpec make(Family family, int r, int n, int L = 0);

    std::vector<int> coords(index_t v) const;
    index_t index_of(const std::vector<int>& coords) const;

    index_t vertex_add(index_t a, index_t b) const;
    index_t vertex_sub(index_t a, index_t b) const;
    index_t vertex_neg(index_t a) const;

    bool is_cube() const { return r == 2; }
};

// Positive dual component of index digit j, folded into (-pi, pi].
double dual_component(int digit, int r);
// Squared euclidean norm |k|^2 of the dual point with index k.
double dual_norm_sq(const TorusSpec& spec, index_t k);
// Number of nonzero components of the dual point (or vertex) with index k.
int nonzero_components(const TorusSpec& spec, index_t k);
// k . x mod 2*pi, as an angle.
double dual_dot(const TorusSpec& spec, index_t k, index_t x);

// Neighbor offsets of the origin, i.e. the support of D, in a fixed order
// (axis-major, then step value). Size equals spec.degree.
std::vector<index_t> generators(const TorusSpec& spec);

std::vector<index_t> neighbors(const TorusSpec& spec, index_t x);

// D(x) = 1/Omega on the neighbors of the origin, 0 elsewhere.
std::vector<double> step_distribution(const TorusSpec& spec);

// True iff the edge set is invariant under x -> -x, checked on the
// generating set. Translation invariance holds by construction.
bool verify_symmetry(const TorusSpec& spec);

// True iff f(x) = f(-x) for every x.
bool is_symmetric(const TorusSpec& spec, const std::vector<double>& f);

// Edges {a, b} ordered by (min vertex index, direction index); each edge
// appears exactly once, count = V * Omega / 2.
std::vector<std::pair<index_t, index_t>> edge_list(const TorusSpec& spec);
index_t edge_count(const TorusSpec& spec);

} // namespace hdtorus

#endif
