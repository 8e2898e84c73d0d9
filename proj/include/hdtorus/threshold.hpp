#ifndef HDTORUS_THRESHOLD_HPP
#define HDTORUS_THRESHOLD_HPP

#include <functional>
#include <utility>
#include <vector>

#include "hdtorus/torus.hpp"

namespace hdtorus {

// chi estimate with its standard error at a given p
using ChiEvaluator = std::function<std::pair<double, double>(double p)>;

struct ThresholdEvaluation {
    double p = 0.0, chi = 0.0, se = 0.0;
    double lo_after = 0.0, hi_after = 0.0; // bracket after processing this point
};

struct ThresholdResult {
    double pc = 0.0;
    double lo = 0.0, hi = 1.0; // final bracket, reported as the interval
    double chi_at_pc = 0.0, chi_se = 0.0;
    double lambda = 0.0, target = 0.0; // target = lambda V^{1/3}
    std::vector<ThresholdEvaluation> evaluations;
};

// Noise-aware monotone bisection of chi(p) = lambda V^{1/3}. Accepts the
// midpoint once the target sits inside the chi +/- 2 se band and within
// max(2 se, 2% of target); otherwise bisects until the bracket is narrower
// than p_tol (default 1e-5 / Omega).
ThresholdResult find_pc_with(const TorusSpec& spec, double lambda, const ChiEvaluator& eval,
                             double p_tol = 0.0);

// MC-backed: coupled evaluations (same seed at every p), mc_budget samples
// each, chi-only accumulation.
ThresholdResult find_pc(const TorusSpec& spec, double lambda, long long mc_budget,
                        std::uint64_t seed, int workers = 0, double p_tol = 0.0);

struct PcAsymptotics {
    double p_omega = 0.0; // p_c Omega
    double dev = 0.0;     // |p_c Omega - 1|, to compare against c1/Omega + c2/(lambda V^{1/3})
};

PcAsymptotics pc_asymptotics_check(const ThresholdResult& result, const TorusSpec& spec);

struct WindowRow {
    double epsilon = 0.0;
    double p = 0.0;
    bool clamped = false; // p_c + epsilon/Omega fell outside [0,1]
    double chi = 0.0, chi_se = 0.0;
    double cmax = 0.0, cmax_se = 0.0;
    index_t tail_k = 0; // selected tail point, largest power of two <= V^{2/3}
    double tail = 0.0, tail_se = 0.0;
};

std::vector<double> default_epsilon_grid(const TorusSpec& spec, double lambda);

std::vector<WindowRow> window_scan(const TorusSpec& spec, double lambda, double pc,
                                   const std::vector<double>& epsilons, long long mc_budget,
                                   std::uint64_t seed, int workers = 0);

} // namespace hdtorus

#endif
