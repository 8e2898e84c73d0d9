#ifndef HDTORUS_SPECTRAL_HPP
#define HDTORUS_SPECTRAL_HPP

#include <functional>
#include <vector>

#include "hdtorus/torus.hpp"

namespace hdtorus {

// Compensated serial summation; fixed order keeps results reproducible.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// Forward transform f_hat(k) = sum_x f(x) e^{ik.x}; real for symmetric f.
std::vector<double> dft(const TorusSpec& spec, const std::vector<double>& f);
// Inverse transform f(x) = (1/V) sum_k f_hat(k) e^{-ik.x}.
std::vector<double> idft(const TorusSpec& spec, const std::vector<double>& F);

// (f*g)(x) = sum_y f(y) g(x-y), via the spectral product.
std::vector<double> convolve(const TorusSpec& spec, const std::vector<double>& f,
                             const std::vector<double>& g);
// Direct O(V^2) convolution, used as the independent route in duality checks.
std::vector<double> convolve_position(const TorusSpec& spec, const std::vector<double>& f,
                                      const std::vector<double>& g);

// Closed-form D-hat for Hamming (1 - r/(r-1) * m(k)/n) and NearestNeighbor
// ((1/n) sum_j cos k_j). SpreadOut is rejected.
double dhat_closed_form(const TorusSpec& spec, index_t k);

// D-hat at a single dual point via the per-axis structure; all families.
double eval_dhat(const TorusSpec& spec, index_t k);

struct DualInfo {
    index_t k;   // dual index
    double dhat; // step-distribution transform at k
    int m;       // number of nonzero components
    double k2;   // |k|^2 with components folded into (-pi, pi]
};

// Visits every dual point in index order without materializing fields;
// amortized O(1) per point via per-axis suffix aggregates.
void for_each_dual(const TorusSpec& spec, const std::function<void(const DualInfo&)>& fn);

// Random walk two-point function C_mu-hat(k) = 1 / (1 - mu Omega D-hat(k)).
double rw_two_point(const TorusSpec& spec, double mu, index_t k);

struct RwTriangleSums {
    double beta_sup;      // max_x D(x) = 1/Omega
    double beta_triangle; // (1/V) sum_{k!=0} Dhat^2 / (1 - mu Omega Dhat)^3
    double open_triangle; // (1/V) sum_{k!=0} (1 - mu Omega Dhat)^{-3}
};

RwTriangleSums rw_triangle_sums(const TorusSpec& spec, double mu);

struct InfraredReport {
    double margin;  // min over k != 0 of (1 - Dhat(k)) / lower_bound(k)
    index_t argmin; // witness dual index
};

// Family lower bound on 1 - Dhat: m/n (Hamming), (2/pi^2)|k|^2/n
// (NearestNeighbor), min(1, L^2 |k|^2) (SpreadOut).
double infrared_lower_bound(const TorusSpec& spec, int m, double k2);
InfraredReport infrared_margin(const TorusSpec& spec);

struct ReturnProbabilityCheck {
    double lhs;   // (1/V) sum_k Dhat(k)^{2i}, the 2i-step return probability
    double bound; // e 2^i i^{2i} / Omega^i
    bool ok;
};

// NearestNeighbor with r >= 3 only.
ReturnProbabilityCheck return_probability_check(const TorusSpec& spec, int i);

} // namespace hdtorus

#endif
