#ifndef HDTORUS_DIAGRAMS_HPP
#define HDTORUS_DIAGRAMS_HPP

#include <vector>

#include "hdtorus/torus.hpp"

namespace hdtorus {

struct MaxWitness {
    double value = 0.0;
    index_t arg = 0; // smallest index attaining the maximum
};

// Triangle diagram nabla(x) = (tau*tau*tau)(x) via the spectral cube.
std::vector<double> triangle(const TorusSpec& spec, const std::vector<double>& tau);
// Direct position-space route, the independent side of the duality check.
std::vector<double> triangle_position(const TorusSpec& spec, const std::vector<double>& tau);

struct TriangleConditionCheck {
    bool ok = false;
    double margin = 0.0; // min over x of RHS - LHS
    index_t argmin = 0;
};

// nabla(x) <= delta_{x,0} + 13 beta + 10 chi^3 / V for all x.
TriangleConditionCheck check_triangle_condition(const std::vector<double>& nabla, double beta,
                                                double chi, index_t volume);

struct OpenTriangles {
    std::vector<double> t_field; // (tau * tau * tau_tilde)(x)
    MaxWitness t;                // T_p = max_x t_field
    MaxWitness t_prime;          // max_x (tau*tau*tau)(x)
    double t2 = 0.0;             // (1/V) sum_k Dhat^2 tau_hat^3
    double s0 = 0.0, s32 = 0.0, s2 = 0.0; // S^(alpha) at the supplied mu
};

OpenTriangles open_triangles(const TorusSpec& spec, const std::vector<double>& tau, double p,
                             double mu);

struct WReport {
    double w0 = 0.0; // W_p(0;k)
    MaxWitness w;    // W_p(k) with argmax y
};

WReport wp(const TorusSpec& spec, const std::vector<double>& tau, double p, index_t k);
// O(V^2) direct evaluation of W_p(y;k), for duality checks.
double wp_position(const TorusSpec& spec, const std::vector<double>& tau, double p, index_t k,
                   index_t y);

enum class HMode { Exact, Bound };

struct HReport {
    double value = 0.0;
    index_t arg_a1 = 0, arg_a2 = 0;
    bool sampled = false;   // maximum taken over a sampled (a1,a2) set
    double max_rep_gap = 0.0; // worst |position - dual| seen in exact mode
};

// Exact mode evaluates H_p(a1,a2;k) by the position-space definition and by
// the dual triple sum, asserts agreement to 1e-9 and returns the maximum over
// the (a1,a2) grid (full grid for V <= 64, 4096 random pairs plus (0,0) for
// 64 < V <= 256). Bound mode returns [1-Dhat(k)] (S0)^{5/3} (S32)^{4/3}.
HReport hp(const TorusSpec& spec, const std::vector<double>& tau, double p, index_t k, HMode mode,
           double mu = -1.0);

// Single-pair exact evaluations, exposed for tests.
double hp_position(const TorusSpec& spec, const std::vector<double>& tau, double p, index_t k,
                   index_t a1, index_t a2);
double hp_dual(const TorusSpec& spec, const std::vector<double>& tau, double p, index_t k,
               index_t a1, index_t a2);

struct PiBound {
    int order = 0;          // N
    double sum_bound = 0.0; // bound on sum_x Pi^(N)(x)
    double cos_bound = 0.0; // bound on sum_x [1-cos(k.x)] Pi^(N)(x)
};

PiBound pi_bound_eval(int order, double t, double t_prime, double w, double w0, double h,
                      double p_omega);

// Remainder bound: sum_bound(M) * p Omega * chi.
double remainder_bound(int order, double t, double t_prime, double p_omega, double chi);

struct SpectrumPrep {
    std::vector<double> tau;     // symmetrized, clamped, tau(0) = 1
    std::vector<double> tau_hat;
    int negative_count = 0;      // # of k with tau_hat(k) < 0 (reported, not clamped)
    double min_value = 0.0;
};

SpectrumPrep prepare_spectrum(const TorusSpec& spec, std::vector<double> tau);

struct DiagramReport {
    double p = 0.0, mu = 0.0;
    std::vector<double> nabla;
    MaxWitness nabla_max_offdiag;
    MaxWitness t, t_prime;
    double t2 = 0.0, s0 = 0.0, s32 = 0.0, s2 = 0.0;
    std::vector<double> w_all, w0_all;  // per dual index (small V only)
    std::vector<double> h_bound_all;    // bound-mode H per dual index
    int tau_hat_negative_count = 0;
    double tau_hat_min = 0.0;
    index_t reference_k = 1;
    std::vector<PiBound> pi_bounds;     // N = 0..5 at reference_k
    double chi = 0.0;
};

DiagramReport diagram_report(const TorusSpec& spec, const std::vector<double>& tau_raw, double p,
                             double lambda);

} // namespace hdtorus

#endif
