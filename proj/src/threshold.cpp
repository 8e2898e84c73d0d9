#include "hdtorus/threshold.hpp"

#include <algorithm>
#include <cmath>

#include "hdtorus/errors.hpp"
#include "hdtorus/percolation.hpp"

namespace hdtorus {

ThresholdResult find_pc_with(const TorusSpec& spec, double lambda, const ChiEvaluator& eval,
                             double p_tol) {
    const double target = lambda * std::cbrt(static_cast<double>(spec.volume));
    if (target <= 1.0)
        throw DomainError("find_pc: target chi = " + std::to_string(target) +
                          " <= 1 = chi(0); no solution in (0,1)");
    if (target >= static_cast<double>(spec.volume))
        throw DomainError("find_pc: target chi = " + std::to_string(target) +
                          " >= V = chi(1); no solution in (0,1)");
    if (p_tol <= 0.0) p_tol = 1e-5 / static_cast<double>(spec.degree);

    ThresholdResult result;
    result.lambda = lambda;
    result.target = target;
    double lo = 0.0, hi = 1.0; // chi(0) = 1 < target < V = chi(1)

    double pc = 0.5, chi_pc = 0.0, se_pc = 0.0;
    bool accepted = false;
    while (hi - lo >= p_tol) {
        const double mid = 0.5 * (lo + hi);
        auto [chi, se] = eval(mid);
        if (chi < target)
            lo = mid;
        else
            hi = mid;
        result.evaluations.push_back({mid, chi, se, lo, hi});
        if (std::abs(chi - target) <= 2.0 * se &&
            std::abs(chi - target) <= std::max(2.0 * se, 0.02 * target)) {
            pc = mid;
            chi_pc = chi;
            se_pc = se;
            accepted = true;
            break;
        }
    }
    if (!accepted) {
        pc = 0.5 * (lo + hi);
        auto [chi, se] = eval(pc);
        chi_pc = chi;
        se_pc = se;
    }
    result.pc = pc;
    result.lo = lo;
    result.hi = hi;
    result.chi_at_pc = chi_pc;
    result.chi_se = se_pc;
    return result;
}

ThresholdResult find_pc(const TorusSpec& spec, double lambda, long long mc_budget,
                        std::uint64_t seed, int workers, double p_tol) {
    if (mc_budget < 1000)
        throw DomainError("find_pc: mc_budget must be >= 1000 samples per evaluation");
    McOptions opts;
    opts.samples = mc_budget;
    opts.seed = seed; // same seed at every p couples the evaluations
    opts.workers = workers;
    opts.two_point = false;
    opts.double_connectivity = false;
    opts.keep_cmax_samples = false;
    auto eval = [&](double p) {
        auto mc = estimate_observables(spec, p, opts);
        return std::pair<double, double>(mc.clusters.chi, mc.clusters.chi_se);
    };
    return find_pc_with(spec, lambda, eval, p_tol);
}

PcAsymptotics pc_asymptotics_check(const ThresholdResult& result, const TorusSpec& spec) {
    PcAsymptotics out;
    out.p_omega = result.pc * static_cast<double>(spec.degree);
    out.dev = std::abs(out.p_omega - 1.0);
    return out;
}

std::vector<double> default_epsilon_grid(const TorusSpec& spec, double lambda) {
    const double unit = 1.0 / (2.0 * lambda * std::cbrt(static_cast<double>(spec.volume)));
    std::vector<double> eps;
    for (double c : {-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0}) eps.push_back(c * unit);
    eps.push_back(-1.0);
    eps.push_back(1.0);
    std::sort(eps.begin(), eps.end());
    eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
    return eps;
}

std::vector<WindowRow> window_scan(const TorusSpec& spec, double lambda, double pc,
                                   const std::vector<double>& epsilons, long long mc_budget,
                                   std::uint64_t seed, int workers) {
    (void)lambda; // part of the experiment identity; the grid already encodes it
    index_t tail_k = 1;
    const double v23 = std::pow(static_cast<double>(spec.volume), 2.0 / 3.0);
    while (static_cast<double>(tail_k) * 2.0 <= v23) tail_k *= 2;

    auto eps = epsilons;
    std::sort(eps.begin(), eps.end());

    McOptions opts;
    opts.samples = mc_budget;
    opts.seed = seed;
    opts.workers = workers;
    opts.two_point = false;
    opts.double_connectivity = false;
    opts.keep_cmax_samples = false;

    std::vector<WindowRow> rows;
    rows.reserve(eps.size());
    for (double e : eps) {
        WindowRow row;
        row.epsilon = e;
        const double raw = pc + e / static_cast<double>(spec.degree);
        row.p = std::min(1.0, std::max(0.0, raw));
        row.clamped = raw != row.p;
        auto mc = estimate_observables(spec, row.p, opts);
        row.chi = mc.clusters.chi;
        row.chi_se = mc.clusters.chi_se;
        row.cmax = mc.clusters.cmax_mean;
        row.cmax_se = mc.clusters.cmax_se;
        row.tail_k = tail_k;
        for (size_t g = 0; g < mc.clusters.tail_k.size(); ++g)
            if (mc.clusters.tail_k[g] == tail_k) {
                row.tail = mc.clusters.tail[g];
                row.tail_se = mc.clusters.tail_se[g];
            }
        rows.push_back(row);
    }
    return rows;
}

} // namespace hdtorus
