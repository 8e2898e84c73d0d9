#ifndef HDTORUS_BOOTSTRAP_HPP
#define HDTORUS_BOOTSTRAP_HPP

#include <vector>

#include "hdtorus/diagrams.hpp"
#include "hdtorus/torus.hpp"

namespace hdtorus {

// Inversion of tau-hat = (1 + Pi-hat) / (1 - p Omega Dhat (1 + Pi-hat)):
// Pi-hat(k) = tau-hat(k) / (1 + p Omega Dhat(k) tau-hat(k)) - 1.
std::vector<double> extract_pi_hat(const TorusSpec& spec, const std::vector<double>& tau_hat,
                                   double p);
double extract_pi_hat0(const TorusSpec& spec, const std::vector<double>& tau_hat, double p);

struct MuResult {
    double mu = 0.0;
    double mu_omega = 0.0;
    bool capped_ceiling = false; // hit 1 - (1/2) lambda^{-1} V^{-1/3}
    bool capped_floor = false;   // hit the positive-part clamp at 0
};

// mu Omega = min{1 - (1/2) lambda^{-1} V^{-1/3}, (p Omega [1 + Pi-hat(0)])^+}.
MuResult mu_of_p_detailed(const TorusSpec& spec, double p, double pi_hat0, double lambda);
double mu_of_p(const TorusSpec& spec, double p, double pi_hat0, double lambda);

struct BootstrapReport {
    double p = 0.0, lambda = 0.0;
    double pi_hat0 = 0.0;
    double mu = 0.0, mu_omega = 0.0;
    bool capped_ceiling = false, capped_floor = false;
    double f1 = 0.0;   // p Omega
    MaxWitness f2;     // max_k tau-hat(k) / C_mu-hat(k)
    double f3 = 0.0;
    index_t f3_k = 0, f3_l = 0;
    bool f3_sampled = false; // maximum taken over a sampled (k,l) set
    double f = 0.0;
};

BootstrapReport bootstrap_f(const TorusSpec& spec, const std::vector<double>& tau_hat, double p,
                            double lambda);

// Discrete calculus on spectral fields; k, l are dual indices.
double forward_diff(const TorusSpec& spec, const std::vector<double>& f, index_t k, index_t l);
double backward_diff(const TorusSpec& spec, const std::vector<double>& f, index_t k, index_t l);
double laplacian(const TorusSpec& spec, const std::vector<double>& f, index_t k, index_t l);
double gcos(const TorusSpec& spec, const std::vector<double>& f, index_t k, index_t l);
double gsin(const TorusSpec& spec, const std::vector<double>& f, index_t k, index_t l);

// Residual of the chain-rule identity for G-hat = 1/(1 - g-hat):
//   -1/2 Delta_k G(l) = 1/2 [G(l-k) + G(l+k)] G(l) [g(l) - gcos(l,k)]
//                       - G(l-k) G(l) G(l+k) gsin(l,k)^2.
double chain_rule_residual(const TorusSpec& spec, const std::vector<double>& g_hat, index_t k,
                           index_t l);

struct CosineSplit {
    double lhs = 0.0; // 1 - cos(sum t_j)
    double rhs = 0.0; // (2J+1) sum_j [1 - cos t_j]
    bool ok = false;
};

CosineSplit cosine_split_bound(const std::vector<double>& t);

struct RatioProfile {
    double m_omega = 0.0; // m_p Omega = 1 - Omega (p_c - p) - lambda^{-1} V^{-1/3}
    double max_dev = 0.0; // max_k |tau-hat(k)/C_{m_p}-hat(k) - 1|
    index_t argmax = 0;
    std::vector<double> profile;
};

RatioProfile tau_asymptotics_check(const TorusSpec& spec, const std::vector<double>& tau_hat,
                                   double p, double p_c, double lambda);

} // namespace hdtorus

#endif
