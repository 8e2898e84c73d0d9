#ifndef HDTORUS_ORACLE_HPP
#define HDTORUS_ORACLE_HPP

#include <vector>

#include "hdtorus/torus.hpp"

namespace hdtorus {

// Exact observables from enumeration of all 2^|B| bond configurations.
struct ExactReport {
    double p = 0.0;
    std::vector<double> tau;  // P(0 <-> x)
    double chi = 0.0;         // E|C(0)| = sum_x tau(x)
    std::vector<double> pi0;  // P(0 <=> x) - delta_{0,x}
    double nabla0 = 0.0;      // (tau * tau * tau)(0)
    std::vector<double> tail; // tail[k] = P(|C(0)| >= k), k = 0..V (tail[0] unused = 1)
    double cmax_mean = 0.0;
};

// Ground truth for graphs with at most 24 bonds; larger inputs are refused.
ExactReport exact_observables(const TorusSpec& spec, double p);

} // namespace hdtorus

#endif
