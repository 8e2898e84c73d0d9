#ifndef HDTORUS_PERCOLATION_HPP
#define HDTORUS_PERCOLATION_HPP

#include <cstdint>
#include <vector>

#include "hdtorus/rng.hpp"
#include "hdtorus/torus.hpp"

namespace hdtorus {

// One bond configuration with its cluster decomposition.
struct PercolationSample {
    std::vector<std::uint8_t> occupied; // per edge, in edge_list order
    std::vector<index_t> cluster_root;  // per vertex, root of its cluster
    std::vector<index_t> cluster_size;  // per vertex, size at the root (valid at roots)
};

PercolationSample sample_configuration(const TorusSpec& spec, double p, RngStream& rng);

struct TwoPointEstimate {
    std::vector<double> tau;    // tau(0) = 1 exactly, symmetric by construction
    std::vector<double> stderr_;
    long long samples = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
};

struct ClusterStats {
    double chi = 0.0, chi_se = 0.0;
    std::vector<index_t> tail_k;  // tail support (1, 2, 4, ..., V)
    std::vector<double> tail;     // P(|C(0)| >= k)
    std::vector<double> tail_se;
    double cmax_mean = 0.0, cmax_se = 0.0;
    std::vector<index_t> cmax_samples; // per-sample |C_max|
};

struct McOptions {
    long long samples = 10000;
    std::uint64_t seed = 1;
    int workers = 0;                 // 0 = hardware default
    bool two_point = true;           // accumulate tau (and pi0 if enabled)
    bool double_connectivity = true; // accumulate P(0 <=> x)
    bool keep_cmax_samples = true;
};

struct McResult {
    TwoPointEstimate two_point;
    std::vector<double> pi0;    // estimate of P(0 <=> x) - delta_{0,x}
    std::vector<double> pi0_se;
    ClusterStats clusters;
};

// Translation-averaged estimators: every ordered pair inside a cluster
// contributes to its displacement, every vertex is an origin for chi and the
// cluster-size tail. Standard errors from batches of 64 consecutive samples.
// Sample i always uses RngStream(seed, i), so results are bit-identical for
// any worker count, and configurations are coupled across p (one uniform per
// edge, thresholded at p).
McResult estimate_observables(const TorusSpec& spec, double p, const McOptions& opts);

// Symmetrize, clamp to [0,1] and pin tau(0) = 1 before spectral use.
std::vector<double> sanitize_two_point(const TorusSpec& spec, std::vector<double> tau);

} // namespace hdtorus

#endif
