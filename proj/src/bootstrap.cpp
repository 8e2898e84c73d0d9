#include "hdtorus/bootstrap.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hdtorus/errors.hpp"
#include "hdtorus/rng.hpp"
#include "hdtorus/spectral.hpp"

namespace hdtorus {

namespace {

double chat(double mu_omega, double dhat) { return 1.0 / (1.0 - mu_omega * dhat); }

std::vector<double> dhat_field(const TorusSpec& spec) {
    std::vector<double> out(static_cast<size_t>(spec.volume));
    for (index_t k = 0; k < spec.volume; ++k) out[static_cast<size_t>(k)] = eval_dhat(spec, k);
    return out;
}

} // namespace

std::vector<double> extract_pi_hat(const TorusSpec& spec, const std::vector<double>& tau_hat,
                                   double p) {
    const double po = p * static_cast<double>(spec.degree);
    std::vector<double> out(tau_hat.size());
    for (index_t k = 0; k < static_cast<index_t>(tau_hat.size()); ++k) {
        const double th = tau_hat[static_cast<size_t>(k)];
        const double denom = 1.0 + po * eval_dhat(spec, k) * th;
        if (std::abs(denom) < 1e-14)
            throw SingularityError("extract_pi_hat: vanishing denominator at dual index " +
                                   std::to_string(k));
        out[static_cast<size_t>(k)] = th / denom - 1.0;
    }
    return out;
}

double extract_pi_hat0(const TorusSpec& spec, const std::vector<double>& tau_hat, double p) {
    const double chi = tau_hat[0];
    const double denom = 1.0 + p * static_cast<double>(spec.degree) * chi;
    if (std::abs(denom) < 1e-14)
        throw SingularityError("extract_pi_hat: vanishing denominator at k = 0");
    return chi / denom - 1.0;
}

MuResult mu_of_p_detailed(const TorusSpec& spec, double p, double pi_hat0, double lambda) {
    if (lambda <= 0.0) throw DomainError("mu_of_p: lambda must be positive");
    const double ceiling = 1.0 - 0.5 / (lambda * std::cbrt(static_cast<double>(spec.volume)));
    if (ceiling < 0.0)
        throw DomainError("mu_of_p: lambda V^{1/3} too small, ceiling 1 - (1/2) lambda^{-1} V^{-1/3} negative");
    const double raw = p * static_cast<double>(spec.degree) * (1.0 + pi_hat0);
    MuResult out;
    out.capped_floor = raw < 0.0;
    const double positive_part = out.capped_floor ? 0.0 : raw;
    out.capped_ceiling = positive_part > ceiling;
    out.mu_omega = out.capped_ceiling ? ceiling : positive_part;
    out.mu = out.mu_omega / static_cast<double>(spec.degree);
    return out;
}

double mu_of_p(const TorusSpec& spec, double p, double pi_hat0, double lambda) {
    return mu_of_p_detailed(spec, p, pi_hat0, lambda).mu;
}

BootstrapReport bootstrap_f(const TorusSpec& spec, const std::vector<double>& tau_hat, double p,
                            double lambda) {
    const index_t v = spec.volume;
    if (v < 2) throw DomainError("bootstrap_f: needs V >= 2");

    BootstrapReport report;
    report.p = p;
    report.lambda = lambda;
    report.pi_hat0 = extract_pi_hat0(spec, tau_hat, p);
    const MuResult mu = mu_of_p_detailed(spec, p, report.pi_hat0, lambda);
    report.mu = mu.mu;
    report.mu_omega = mu.mu_omega;
    report.capped_ceiling = mu.capped_ceiling;
    report.capped_floor = mu.capped_floor;
    report.f1 = p * static_cast<double>(spec.degree);

    const auto dh = dhat_field(spec);

    report.f2 = MaxWitness{-std::numeric_limits<double>::infinity(), 0};
    for (index_t k = 0; k < v; ++k) {
        const double ratio = tau_hat[static_cast<size_t>(k)] * (1.0 - mu.mu_omega * dh[static_cast<size_t>(k)]);
        if (ratio > report.f2.value) report.f2 = MaxWitness{ratio, k};
    }

    auto f3_term = [&](index_t k, index_t l) {
        const double c_inf = 1.0 / (1.0 - dh[static_cast<size_t>(k)]);
        const index_t lm = spec.vertex_sub(l, k), lp = spec.vertex_add(l, k);
        const double num = std::abs(tau_hat[static_cast<size_t>(l)] -
                                    0.5 * (tau_hat[static_cast<size_t>(lm)] + tau_hat[static_cast<size_t>(lp)]));
        const double cm = chat(mu.mu_omega, dh[static_cast<size_t>(lm)]);
        const double cl = chat(mu.mu_omega, dh[static_cast<size_t>(l)]);
        const double cp = chat(mu.mu_omega, dh[static_cast<size_t>(lp)]);
        return c_inf / 8.0 * num / (cm * cl + cl * cp + cm * cp);
    };

    report.f3 = 0.0;
    if (v <= 4096) {
        for (index_t k = 1; k < v; ++k)
            for (index_t l = 0; l < v; ++l) {
                const double val = f3_term(k, l);
                if (val > report.f3) {
                    report.f3 = val;
                    report.f3_k = k;
                    report.f3_l = l;
                }
            }
    } else {
        // certified lower bound on f3: scalar multiples of k plus random pairs
        report.f3_sampled = true;
        auto consider = [&](index_t k, index_t l) {
            const double val = f3_term(k, l);
            if (val > report.f3) {
                report.f3 = val;
                report.f3_k = k;
                report.f3_l = l;
            }
        };
        for (index_t k = 1; k < v; ++k) {
            index_t l = 0;
            for (int j = 0; j < spec.r; ++j) {
                consider(k, l);
                l = spec.vertex_add(l, k);
            }
        }
        RngStream rng(0xB00757u, static_cast<std::uint64_t>(v));
        for (long long i = 0; i < 1000000; ++i) {
            const index_t k = 1 + static_cast<index_t>(rng.next_u64() % static_cast<std::uint64_t>(v - 1));
            const index_t l = static_cast<index_t>(rng.next_u64() % static_cast<std::uint64_t>(v));
            consider(k, l);
        }
    }

    report.f = std::max(report.f1, std::max(report.f2.value, report.f3));
    return report;
}

double forward_diff(const TorusSpec& spec, const std::vector<double>& f, index_t k, index_t l) {
    return f[static_cast<size_t>(spec.vertex_add(l, k))] - f[static_cast<size_t>(l)];
}

double backward_diff(const TorusSpec& spec, const std::vector<double>& f, index_t k, index_t l) {
    return f[static_cast<size_t>(l)] - f[static_cast<size_t>(spec.vertex_sub(l, k))];
}

double laplacian(const TorusSpec& spec, const std::vector<double>& f, index_t k, index_t l) {
    return f[static_cast<size_t>(spec.vertex_add(l, k))] - 2.0 * f[static_cast<size_t>(l)] +
           f[static_cast<size_t>(spec.vertex_sub(l, k))];
}

double gcos(const TorusSpec& spec, const std::vector<double>& f, index_t k, index_t l) {
    return 0.5 * (f[static_cast<size_t>(spec.vertex_sub(l, k))] +
                  f[static_cast<size_t>(spec.vertex_add(l, k))]);
}

double gsin(const TorusSpec& spec, const std::vector<double>& f, index_t k, index_t l) {
    return 0.5 * (f[static_cast<size_t>(spec.vertex_sub(l, k))] -
                  f[static_cast<size_t>(spec.vertex_add(l, k))]);
}

double chain_rule_residual(const TorusSpec& spec, const std::vector<double>& g_hat, index_t k,
                           index_t l) {
    auto big_g = [&](index_t at) {
        const double denom = 1.0 - g_hat[static_cast<size_t>(at)];
        if (std::abs(denom) < 1e-14)
            throw SingularityError("chain_rule_residual: 1 - g-hat vanishes at dual index " +
                                   std::to_string(at));
        return 1.0 / denom;
    };
    const index_t lm = spec.vertex_sub(l, k), lp = spec.vertex_add(l, k);
    const double gm = big_g(lm), gl = big_g(l), gp = big_g(lp);
    const double lhs = -(gp - 2.0 * gl + gm) / 2.0;
    const double gc = gcos(spec, g_hat, k, l);
    const double gs = gsin(spec, g_hat, k, l);
    const double rhs = 0.5 * (gm + gp) * gl * (g_hat[static_cast<size_t>(l)] - gc) - gm * gl * gp * gs * gs;
    return std::abs(lhs - rhs);
}

CosineSplit cosine_split_bound(const std::vector<double>& t) {
    if (t.empty()) throw DomainError("cosine_split_bound: needs at least one angle");
    CosineSplit out;
    double total = 0.0;
    KahanSum rhs;
    for (double tj : t) {
        total += tj;
        rhs.add(1.0 - std::cos(tj));
    }
    out.lhs = 1.0 - std::cos(total);
    out.rhs = (2.0 * static_cast<double>(t.size()) + 1.0) * rhs.value();
    out.ok = out.lhs <= out.rhs + 1e-12;
    return out;
}

RatioProfile tau_asymptotics_check(const TorusSpec& spec, const std::vector<double>& tau_hat,
                                   double p, double p_c, double lambda) {
    if (p > p_c) throw DomainError("tau_asymptotics_check: requires p <= p_c");
    const double omega = static_cast<double>(spec.degree);
    const double m_omega =
        1.0 - omega * (p_c - p) - 1.0 / (lambda * std::cbrt(static_cast<double>(spec.volume)));
    if (m_omega >= 1.0 || m_omega < 0.0)
        throw DomainError("tau_asymptotics_check: m_p Omega = " + std::to_string(m_omega) +
                          " outside [0,1)");

    RatioProfile out;
    out.m_omega = m_omega;
    out.profile.resize(tau_hat.size());
    for (index_t k = 0; k < static_cast<index_t>(tau_hat.size()); ++k) {
        const double ratio =
            tau_hat[static_cast<size_t>(k)] * (1.0 - m_omega * eval_dhat(spec, k));
        out.profile[static_cast<size_t>(k)] = ratio;
        const double dev = std::abs(ratio - 1.0);
        if (dev > out.max_dev) {
            out.max_dev = dev;
            out.argmax = k;
        }
    }
    return out;
}

} // namespace hdtorus
