#include "hdtorus/diagrams.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hdtorus/bootstrap.hpp"
#include "hdtorus/percolation.hpp"
#include "hdtorus/errors.hpp"
#include "hdtorus/rng.hpp"
#include "hdtorus/spectral.hpp"

namespace hdtorus {

namespace {

MaxWitness max_of(const std::vector<double>& f) {
    MaxWitness w{f.empty() ? 0.0 : f[0], 0};
    for (index_t i = 1; i < static_cast<index_t>(f.size()); ++i)
        if (f[static_cast<size_t>(i)] > w.value) {
            w.value = f[static_cast<size_t>(i)];
            w.arg = i;
        }
    return w;
}

std::vector<double> tau_tilde(const TorusSpec& spec, const std::vector<double>& tau, double p) {
    auto t = convolve(spec, step_distribution(spec), tau);
    const double po = p * static_cast<double>(spec.degree);
    for (auto& x : t) x *= po;
    return t;
}

std::vector<double> cos_weights(const TorusSpec& spec, index_t k) {
    std::vector<double> w(static_cast<size_t>(spec.volume));
    for (index_t x = 0; x < spec.volume; ++x)
        w[static_cast<size_t>(x)] = 1.0 - std::cos(dual_dot(spec, k, x));
    return w;
}

double chat_mu(double mu_omega, double dhat, index_t k) {
    double denom = 1.0 - mu_omega * dhat;
    if (std::abs(denom) < 1e-14)
        throw SingularityError("C_mu singular at dual index " + std::to_string(k));
    return 1.0 / denom;
}

} // namespace

std::vector<double> triangle(const TorusSpec& spec, const std::vector<double>& tau) {
    auto t = dft(spec, tau);
    for (auto& x : t) x = x * x * x;
    return idft(spec, t);
}

std::vector<double> triangle_position(const TorusSpec& spec, const std::vector<double>& tau) {
    return convolve_position(spec, convolve_position(spec, tau, tau), tau);
}

TriangleConditionCheck check_triangle_condition(const std::vector<double>& nabla, double beta,
                                                double chi, index_t volume) {
    if (beta <= 0.0) throw DomainError("check_triangle_condition: beta must be positive");
    TriangleConditionCheck out;
    out.margin = std::numeric_limits<double>::infinity();
    const double base = 13.0 * beta + 10.0 * chi * chi * chi / static_cast<double>(volume);
    for (index_t x = 0; x < static_cast<index_t>(nabla.size()); ++x) {
        const double rhs = (x == 0 ? 1.0 : 0.0) + base;
        const double gap = rhs - nabla[static_cast<size_t>(x)];
        if (gap < out.margin) {
            out.margin = gap;
            out.argmin = x;
        }
    }
    out.ok = out.margin >= 0.0;
    return out;
}

OpenTriangles open_triangles(const TorusSpec& spec, const std::vector<double>& tau, double p,
                             double mu) {
    const index_t v = spec.volume;
    const double po = p * static_cast<double>(spec.degree);
    const double mu_omega = mu * static_cast<double>(spec.degree);
    if (mu < 0.0) throw DomainError("open_triangles: mu must be nonnegative");

    auto tau_hat = dft(spec, tau);
    OpenTriangles out;

    std::vector<double> cube(static_cast<size_t>(v)), mixed(static_cast<size_t>(v));
    KahanSum t2, s0, s32, s2;
    for (index_t k = 0; k < v; ++k) {
        const double th = tau_hat[static_cast<size_t>(k)];
        const double dh = eval_dhat(spec, k);
        cube[static_cast<size_t>(k)] = th * th * th;
        mixed[static_cast<size_t>(k)] = th * th * (po * dh * th);
        t2.add(dh * dh * th * th * th);
        const double c = chat_mu(mu_omega, dh, k);
        const double c3 = c * c * c;
        s0.add(c3);
        s32.add(std::pow(std::abs(dh), 1.5) * c3);
        s2.add(dh * dh * c3);
    }
    auto nabla = idft(spec, cube);
    out.t_field = idft(spec, mixed);
    out.t = max_of(out.t_field);
    out.t_prime = max_of(nabla);
    const double vd = static_cast<double>(v);
    out.t2 = t2.value() / vd;
    out.s0 = s0.value() / vd;
    out.s32 = s32.value() / vd;
    out.s2 = s2.value() / vd;
    return out;
}

WReport wp(const TorusSpec& spec, const std::vector<double>& tau, double p, index_t k) {
    auto tt = tau_tilde(spec, tau, p);
    auto w = cos_weights(spec, k);
    for (index_t x = 0; x < spec.volume; ++x) tt[static_cast<size_t>(x)] *= w[static_cast<size_t>(x)];
    // sum_x g(x) tau(x+y) = (g * tau)(y) for symmetric g
    auto field = convolve(spec, tt, tau);
    WReport out;
    out.w0 = field[0];
    out.w = max_of(field);
    return out;
}

double wp_position(const TorusSpec& spec, const std::vector<double>& tau, double p, index_t k,
                   index_t y) {
    auto tt = tau_tilde(spec, tau, p);
    KahanSum acc;
    for (index_t x = 0; x < spec.volume; ++x) {
        const double w = 1.0 - std::cos(dual_dot(spec, k, x));
        acc.add(w * tt[static_cast<size_t>(x)] * tau[static_cast<size_t>(spec.vertex_add(x, y))]);
    }
    return acc.value();
}

double hp_position(const TorusSpec& spec, const std::vector<double>& tau, double p, index_t k,
                   index_t a1, index_t a2) {
    const index_t v = spec.volume;
    auto tt = tau_tilde(spec, tau, p);
    auto w = cos_weights(spec, k);
    // P(x,y) = sum_a tau(a) tau(x-a) tau(y-a); Q = tau * tau_tilde
    std::vector<double> pxy(static_cast<size_t>(v) * static_cast<size_t>(v), 0.0);
    for (index_t x = 0; x < v; ++x)
        for (index_t y = 0; y < v; ++y) {
            KahanSum acc;
            for (index_t a = 0; a < v; ++a)
                acc.add(tau[static_cast<size_t>(a)] * tau[static_cast<size_t>(spec.vertex_sub(x, a))] *
                        tau[static_cast<size_t>(spec.vertex_sub(y, a))]);
            pxy[static_cast<size_t>(x) * static_cast<size_t>(v) + static_cast<size_t>(y)] = acc.value();
        }
    auto q = convolve(spec, tau, tt);

    KahanSum total;
    for (index_t u = 0; u < v; ++u) {
        for (index_t t = 0; t < v; ++t) {
            const double wt = w[static_cast<size_t>(spec.vertex_sub(t, u))] *
                              tau[static_cast<size_t>(u)] *
                              tau[static_cast<size_t>(spec.vertex_sub(t, u))];
            if (wt == 0.0) continue;
            KahanSum inner;
            for (index_t s = 0; s < v; ++s) {
                const double b1 = tt[static_cast<size_t>(spec.vertex_sub(s, a1))];
                const double pv = pxy[static_cast<size_t>(spec.vertex_sub(u, s)) * static_cast<size_t>(v) +
                                      static_cast<size_t>(spec.vertex_sub(t, s))];
                const double qv = q[static_cast<size_t>(spec.vertex_sub(spec.vertex_sub(t, s), a2))];
                inner.add(b1 * pv * qv);
            }
            total.add(wt * inner.value());
        }
    }
    return total.value();
}

namespace {

struct HDualTables {
    index_t v;
    std::vector<double> weighted;   // tau-hat of [1-cos(k.x)] tau
    std::vector<double> dtau2;      // p Omega Dhat tau_hat^2
    std::vector<double> tau_hat;
    std::vector<double> inner;      // M(l1,l2) = sum_l3 weighted(l3) tau_hat(l2-l3) tau_hat(l1-l3)
};

HDualTables h_dual_tables(const TorusSpec& spec, const std::vector<double>& tau, double p,
                          index_t k) {
    HDualTables tab;
    tab.v = spec.volume;
    tab.tau_hat = dft(spec, tau);
    const double po = p * static_cast<double>(spec.degree);
    tab.dtau2.resize(static_cast<size_t>(tab.v));
    tab.weighted.resize(static_cast<size_t>(tab.v));
    for (index_t l = 0; l < tab.v; ++l) {
        const double th = tab.tau_hat[static_cast<size_t>(l)];
        tab.dtau2[static_cast<size_t>(l)] = po * eval_dhat(spec, l) * th * th;
        tab.weighted[static_cast<size_t>(l)] =
            th - 0.5 * (tab.tau_hat[static_cast<size_t>(spec.vertex_sub(l, k))] +
                        tab.tau_hat[static_cast<size_t>(spec.vertex_add(l, k))]);
    }
    tab.inner.assign(static_cast<size_t>(tab.v) * static_cast<size_t>(tab.v), 0.0);
    for (index_t l1 = 0; l1 < tab.v; ++l1)
        for (index_t l2 = 0; l2 < tab.v; ++l2) {
            KahanSum acc;
            for (index_t l3 = 0; l3 < tab.v; ++l3)
                acc.add(tab.weighted[static_cast<size_t>(l3)] *
                        tab.tau_hat[static_cast<size_t>(spec.vertex_sub(l2, l3))] *
                        tab.tau_hat[static_cast<size_t>(spec.vertex_sub(l1, l3))]);
            tab.inner[static_cast<size_t>(l1) * static_cast<size_t>(tab.v) + static_cast<size_t>(l2)] =
                acc.value();
        }
    return tab;
}

double h_dual_at(const TorusSpec& spec, const HDualTables& tab, index_t a1, index_t a2) {
    const index_t v = tab.v;
    KahanSum acc;
    for (index_t l1 = 0; l1 < v; ++l1) {
        const double f1 = tab.dtau2[static_cast<size_t>(l1)];
        if (f1 == 0.0) continue;
        const double ang1 = dual_dot(spec, l1, a1);
        for (index_t l2 = 0; l2 < v; ++l2) {
            const double f2 = tab.dtau2[static_cast<size_t>(l2)];
            if (f2 == 0.0) continue;
            const double phase = std::cos(ang1 + dual_dot(spec, l2, a2));
            acc.add(f1 * f2 * phase * tab.tau_hat[static_cast<size_t>(spec.vertex_sub(l1, l2))] *
                    tab.inner[static_cast<size_t>(l1) * static_cast<size_t>(v) + static_cast<size_t>(l2)]);
        }
    }
    const double vd = static_cast<double>(v);
    return acc.value() / (vd * vd * vd);
}

} // namespace

double hp_dual(const TorusSpec& spec, const std::vector<double>& tau, double p, index_t k,
               index_t a1, index_t a2) {
    return h_dual_at(spec, h_dual_tables(spec, tau, p, k), a1, a2);
}

HReport hp(const TorusSpec& spec, const std::vector<double>& tau, double p, index_t k, HMode mode,
           double mu) {
    const index_t v = spec.volume;
    if (mode == HMode::Bound) {
        if (mu < 0.0) throw DomainError("hp: bound mode needs the comparison mass mu");
        auto ot = open_triangles(spec, tau, p, mu);
        HReport out;
        out.value = (1.0 - eval_dhat(spec, k)) * std::pow(ot.s0, 5.0 / 3.0) * std::pow(ot.s32, 4.0 / 3.0);
        return out;
    }

    if (v > 256)
        throw SizeError("hp: exact mode capped at V = 256 (V = " + std::to_string(v) +
                        "); use bound mode");

    std::vector<std::pair<index_t, index_t>> pairs;
    bool sampled = false;
    if (v <= 64) {
        for (index_t a1 = 0; a1 < v; ++a1)
            for (index_t a2 = 0; a2 < v; ++a2) pairs.emplace_back(a1, a2);
    } else {
        sampled = true;
        pairs.emplace_back(0, 0);
        RngStream rng(0x48504152u, static_cast<std::uint64_t>(v));
        for (int i = 0; i < 4096; ++i)
            pairs.emplace_back(static_cast<index_t>(rng.next_u64() % static_cast<std::uint64_t>(v)),
                               static_cast<index_t>(rng.next_u64() % static_cast<std::uint64_t>(v)));
    }

    const auto tables = h_dual_tables(spec, tau, p, k);
    HReport out;
    out.sampled = sampled;
    out.value = -std::numeric_limits<double>::infinity();
    for (const auto& [a1, a2] : pairs) {
        const double dual = h_dual_at(spec, tables, a1, a2);
        const double pos = hp_position(spec, tau, p, k, a1, a2);
        const double gap = std::abs(dual - pos);
        out.max_rep_gap = std::max(out.max_rep_gap, gap);
        if (gap > 1e-9 * std::max(1.0, std::abs(pos)))
            throw std::runtime_error("hp: position/dual representations disagree by " +
                                     std::to_string(gap) + " at (a1,a2)=(" + std::to_string(a1) +
                                     "," + std::to_string(a2) + ")");
        if (pos > out.value) {
            out.value = pos;
            out.arg_a1 = a1;
            out.arg_a2 = a2;
        }
    }
    return out;
}

PiBound pi_bound_eval(int order, double t, double t_prime, double w, double w0, double h,
                      double p_omega) {
    if (order < 0) throw DomainError("pi_bound_eval: order must be >= 0");
    if (t < 0 || t_prime < 0 || w < 0 || w0 < 0 || h < 0 || p_omega < 0)
        throw DomainError("pi_bound_eval: diagram ingredients must be nonnegative");
    PiBound out;
    out.order = order;
    if (order == 0) {
        out.sum_bound = t;
        out.cos_bound = w0;
        return out;
    }
    const double geometric = 2.0 * t * t_prime;
    out.sum_bound = t_prime * std::pow(geometric, order);
    const double general_first =
        t_prime * w * (2.0 * t + (1.0 + p_omega) * order * t_prime) * std::pow(geometric, order - 1);
    if (order == 1) {
        out.cos_bound = std::min(7.0 * general_first, w0 + 31.0 * t * t_prime * w);
    } else {
        const double second = (order - 1) * (t * t * w + h) * t_prime * t_prime *
                              std::pow(geometric, order - 2);
        out.cos_bound = (4.0 * order + 3.0) * (general_first + second);
    }
    return out;
}

double remainder_bound(int order, double t, double t_prime, double p_omega, double chi) {
    return pi_bound_eval(order, t, t_prime, 0.0, 0.0, 0.0, p_omega).sum_bound * p_omega * chi;
}

SpectrumPrep prepare_spectrum(const TorusSpec& spec, std::vector<double> tau) {
    SpectrumPrep out;
    out.tau = sanitize_two_point(spec, std::move(tau));
    out.tau_hat = dft(spec, out.tau);
    out.min_value = out.tau_hat.empty() ? 0.0 : out.tau_hat[0];
    for (double x : out.tau_hat) {
        if (x < 0.0) ++out.negative_count;
        out.min_value = std::min(out.min_value, x);
    }
    return out;
}

DiagramReport diagram_report(const TorusSpec& spec, const std::vector<double>& tau_raw, double p,
                             double lambda) {
    auto prep = prepare_spectrum(spec, tau_raw);
    const index_t v = spec.volume;

    DiagramReport report;
    report.p = p;
    report.tau_hat_negative_count = prep.negative_count;
    report.tau_hat_min = prep.min_value;
    report.chi = prep.tau_hat[0];

    const double pi_hat0 = extract_pi_hat0(spec, prep.tau_hat, p);
    report.mu = mu_of_p(spec, p, pi_hat0, lambda);

    report.nabla = triangle(spec, prep.tau);
    MaxWitness off{-std::numeric_limits<double>::infinity(), 0};
    for (index_t x = 1; x < v; ++x)
        if (report.nabla[static_cast<size_t>(x)] > off.value) {
            off.value = report.nabla[static_cast<size_t>(x)];
            off.arg = x;
        }
    report.nabla_max_offdiag = off;

    auto ot = open_triangles(spec, prep.tau, p, report.mu);
    report.t = ot.t;
    report.t_prime = ot.t_prime;
    report.t2 = ot.t2;
    report.s0 = ot.s0;
    report.s32 = ot.s32;
    report.s2 = ot.s2;

    if (v <= 4096) {
        report.w_all.resize(static_cast<size_t>(v));
        report.w0_all.resize(static_cast<size_t>(v));
        report.h_bound_all.resize(static_cast<size_t>(v));
        const double hfactor = std::pow(ot.s0, 5.0 / 3.0) * std::pow(ot.s32, 4.0 / 3.0);
        for (index_t k = 0; k < v; ++k) {
            auto wr = wp(spec, prep.tau, p, k);
            report.w_all[static_cast<size_t>(k)] = wr.w.value;
            report.w0_all[static_cast<size_t>(k)] = wr.w0;
            report.h_bound_all[static_cast<size_t>(k)] = (1.0 - eval_dhat(spec, k)) * hfactor;
        }
    }

    report.reference_k = v > 1 ? 1 : 0;
    auto wref = wp(spec, prep.tau, p, report.reference_k);
    const double ho = (1.0 - eval_dhat(spec, report.reference_k)) *
                     std::pow(ot.s0, 5.0 / 3.0) * std::pow(ot.s32, 4.0 / 3.0);
    const double p_omega = p * static_cast<double>(spec.degree);
    for (int n = 0; n <= 5; ++n)
        report.pi_bounds.push_back(
            pi_bound_eval(n, ot.t.value, ot.t_prime.value, wref.w.value, wref.w0, ho, p_omega));
    return report;
}

} // namespace hdtorus
