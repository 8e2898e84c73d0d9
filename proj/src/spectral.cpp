#include "hdtorus/spectral.hpp"

#include <cassert>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "hdtorus/errors.hpp"

namespace hdtorus {

namespace {

constexpr index_t kMaxTransformSize = index_t{1} << 24;

void check_field(const TorusSpec& spec, const std::vector<double>& f, const char* what) {
    if (static_cast<index_t>(f.size()) != spec.volume)
        throw DomainError(std::string(what) + ": field length " + std::to_string(f.size()) +
                          " does not match torus volume " + std::to_string(spec.volume));
    if (spec.volume > kMaxTransformSize)
        throw SizeError(std::string(what) + ": volume " + std::to_string(spec.volume) +
                        " too large for a materialized transform");
}

// Axis-wise complex transform; each axis is a batch of naive length-r
// transforms, which is optimal here since r stays tiny while n grows.
std::vector<std::complex<double>> axis_transform(const TorusSpec& spec,
                                                 std::vector<std::complex<double>> a,
                                                 int sign) {
    const int r = spec.r;
    std::vector<std::complex<double>> twiddle(static_cast<size_t>(r) * r);
    for (int t = 0; t < r; ++t)
        for (int u = 0; u < r; ++u) {
            double ang = sign * 2.0 * M_PI * ((static_cast<long long>(t) * u) % r) / r;
            twiddle[static_cast<size_t>(t) * r + u] = {std::cos(ang), std::sin(ang)};
        }

    std::vector<std::complex<double>> line(static_cast<size_t>(r));
    index_t stride = 1;
    for (int axis = 0; axis < spec.n; ++axis) {
        const index_t block = stride * r;
        for (index_t start = 0; start < spec.volume; start += block) {
            for (index_t off = 0; off < stride; ++off) {
                for (int t = 0; t < r; ++t) line[static_cast<size_t>(t)] = a[static_cast<size_t>(start + off + t * stride)];
                for (int t = 0; t < r; ++t) {
                    std::complex<double> acc{0.0, 0.0};
                    const auto* row = &twiddle[static_cast<size_t>(t) * r];
                    for (int u = 0; u < r; ++u) acc += row[u] * line[static_cast<size_t>(u)];
                    a[static_cast<size_t>(start + off + t * stride)] = acc;
                }
            }
        }
        stride = block;
    }
    return a;
}

std::vector<double> take_real(const std::vector<std::complex<double>>& a) {
    std::vector<double> out(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
#ifndef NDEBUG
        assert(std::abs(a[i].imag()) < 1e-9 && "transform of a symmetric field must be real");
#endif
        out[i] = a[i].real();
    }
    return out;
}

} // namespace

std::vector<double> dft(const TorusSpec& spec, const std::vector<double>& f) {
    check_field(spec, f, "dft");
    std::vector<std::complex<double>> a(f.begin(), f.end());
    return take_real(axis_transform(spec, std::move(a), +1));
}

std::vector<double> idft(const TorusSpec& spec, const std::vector<double>& F) {
    check_field(spec, F, "idft");
    std::vector<std::complex<double>> a(F.begin(), F.end());
    a = axis_transform(spec, std::move(a), -1);
    const double inv = 1.0 / static_cast<double>(spec.volume);
    for (auto& z : a) z *= inv;
    return take_real(a);
}

std::vector<double> convolve(const TorusSpec& spec, const std::vector<double>& f,
                             const std::vector<double>& g) {
    auto fh = dft(spec, f);
    auto gh = dft(spec, g);
    for (size_t i = 0; i < fh.size(); ++i) fh[i] *= gh[i];
    return idft(spec, fh);
}

std::vector<double> convolve_position(const TorusSpec& spec, const std::vector<double>& f,
                                      const std::vector<double>& g) {
    check_field(spec, f, "convolve_position");
    check_field(spec, g, "convolve_position");
    std::vector<double> out(f.size(), 0.0);
    for (index_t x = 0; x < spec.volume; ++x) {
        KahanSum acc;
        for (index_t y = 0; y < spec.volume; ++y)
            acc.add(f[static_cast<size_t>(y)] * g[static_cast<size_t>(spec.vertex_sub(x, y))]);
        out[static_cast<size_t>(x)] = acc.value();
    }
    return out;
}

double dhat_closed_form(const TorusSpec& spec, index_t k) {
    switch (spec.family) {
        case Family::Hamming: {
            int m = nonzero_components(spec, k);
            return 1.0 - static_cast<double>(spec.r) / (spec.r - 1) * m / spec.n;
        }
        case Family::NearestNeighbor: {
            double acc = 0.0;
            index_t rest = k;
            for (int j = 0; j < spec.n; ++j) {
                acc += std::cos(dual_component(static_cast<int>(rest % spec.r), spec.r));
                rest /= spec.r;
            }
            return acc / spec.n;
        }
        case Family::SpreadOut:
            throw DomainError("dhat_closed_form: spread-out family has no closed form; use dft");
    }
    return 0.0;
}

double eval_dhat(const TorusSpec& spec, index_t k) {
    if (spec.family != Family::SpreadOut) return dhat_closed_form(spec, k);
    // Dirichlet-kernel product: D-hat = (prod_j S_L(k_j) - 1) / Omega
    double prod = 1.0;
    index_t rest = k;
    for (int j = 0; j < spec.n; ++j) {
        double comp = dual_component(static_cast<int>(rest % spec.r), spec.r);
        double s = 1.0;
        for (int step = 1; step <= spec.L; ++step) s += 2.0 * std::cos(comp * step);
        prod *= s;
        rest /= spec.r;
    }
    return (prod - 1.0) / static_cast<double>(spec.degree);
}

void for_each_dual(const TorusSpec& spec, const std::function<void(const DualInfo&)>& fn) {
    const int r = spec.r;
    const int n = spec.n;

    // per-digit tables
    std::vector<double> cos_tab(static_cast<size_t>(r)), k2_tab(static_cast<size_t>(r)),
        dirichlet_tab(static_cast<size_t>(r));
    for (int d = 0; d < r; ++d) {
        double comp = dual_component(d, r);
        cos_tab[static_cast<size_t>(d)] = std::cos(comp);
        k2_tab[static_cast<size_t>(d)] = comp * comp;
        double s = 1.0;
        for (int step = 1; step <= spec.L; ++step) s += 2.0 * std::cos(comp * step);
        dirichlet_tab[static_cast<size_t>(d)] = s;
    }

    struct Agg {
        double cos_sum = 0.0;
        double k2 = 0.0;
        double prod = 1.0;
        int m = 0;
    };

    std::vector<int> digit(static_cast<size_t>(n), 0);
    std::vector<Agg> suffix(static_cast<size_t>(n) + 1); // suffix[a] aggregates axes >= a
    auto refresh = [&](int from) {
        for (int a = from; a >= 0; --a) {
            const Agg& hi = suffix[static_cast<size_t>(a) + 1];
            int d = digit[static_cast<size_t>(a)];
            Agg& cur = suffix[static_cast<size_t>(a)];
            cur.cos_sum = hi.cos_sum + cos_tab[static_cast<size_t>(d)];
            cur.k2 = hi.k2 + k2_tab[static_cast<size_t>(d)];
            cur.prod = hi.prod * dirichlet_tab[static_cast<size_t>(d)];
            cur.m = hi.m + (d != 0);
        }
    };
    refresh(n - 1);

    DualInfo info;
    const double degree = static_cast<double>(spec.degree);
    for (index_t k = 0;; ++k) {
        const Agg& root = suffix[0];
        info.k = k;
        info.m = root.m;
        info.k2 = root.k2;
        switch (spec.family) {
            case Family::NearestNeighbor: info.dhat = root.cos_sum / n; break;
            case Family::Hamming: info.dhat = 1.0 - static_cast<double>(r) / (r - 1) * root.m / n; break;
            case Family::SpreadOut: info.dhat = (root.prod - 1.0) / degree; break;
        }
        fn(info);

        int axis = 0;
        for (; axis < n; ++axis) {
            if (++digit[static_cast<size_t>(axis)] < r) break;
            digit[static_cast<size_t>(axis)] = 0;
        }
        if (axis == n) break;
        refresh(axis);
    }
}

double rw_two_point(const TorusSpec& spec, double mu, index_t k) {
    if (mu < 0.0) throw DomainError("rw_two_point: mu must be nonnegative");
    double denom = 1.0 - mu * static_cast<double>(spec.degree) * eval_dhat(spec, k);
    if (std::abs(denom) < 1e-14)
        throw SingularityError("rw_two_point: singular denominator at dual index " + std::to_string(k));
    if (denom < 0.0)
        throw DomainError("rw_two_point: mu Omega Dhat(k) exceeds 1 at dual index " + std::to_string(k));
    return 1.0 / denom;
}

RwTriangleSums rw_triangle_sums(const TorusSpec& spec, double mu) {
    const double mu_omega = mu * static_cast<double>(spec.degree);
    if (mu < 0.0 || mu_omega > 1.0 + 1e-12)
        throw DomainError("rw_triangle_sums: requires 0 <= mu Omega <= 1, got mu Omega = " +
                          std::to_string(mu_omega));

    KahanSum triangle, open;
    for_each_dual(spec, [&](const DualInfo& info) {
        if (info.k == 0) return; // the omitted term is infinite at criticality
        double denom = 1.0 - mu_omega * info.dhat;
        if (denom < 1e-14)
            throw SingularityError("rw_triangle_sums: Dhat = 1 at nonzero dual index " +
                                   std::to_string(info.k));
        double inv3 = 1.0 / (denom * denom * denom);
        triangle.add(info.dhat * info.dhat * inv3);
        open.add(inv3);
    });

    const double v = static_cast<double>(spec.volume);
    return RwTriangleSums{1.0 / static_cast<double>(spec.degree), triangle.value() / v,
                          open.value() / v};
}

double infrared_lower_bound(const TorusSpec& spec, int m, double k2) {
    switch (spec.family) {
        case Family::Hamming: return static_cast<double>(m) / spec.n;
        case Family::NearestNeighbor: return 2.0 / (M_PI * M_PI) * k2 / spec.n;
        case Family::SpreadOut: return std::min(1.0, static_cast<double>(spec.L) * spec.L * k2);
    }
    return 0.0;
}

InfraredReport infrared_margin(const TorusSpec& spec) {
    InfraredReport report{std::numeric_limits<double>::infinity(), 0};
    for_each_dual(spec, [&](const DualInfo& info) {
        if (info.k == 0) return;
        double ratio = (1.0 - info.dhat) / infrared_lower_bound(spec, info.m, info.k2);
        if (ratio < report.margin) {
            report.margin = ratio;
            report.argmin = info.k;
        }
    });
    return report;
}

ReturnProbabilityCheck return_probability_check(const TorusSpec& spec, int i) {
    if (spec.family != Family::NearestNeighbor || spec.r < 3)
        throw DomainError("return_probability_check: bound is proved for nearest-neighbor tori with r >= 3");
    if (i < 1) throw DomainError("return_probability_check: i must be >= 1");

    KahanSum sum;
    for_each_dual(spec, [&](const DualInfo& info) {
        double p = 1.0;
        for (int j = 0; j < 2 * i; ++j) p *= info.dhat;
        sum.add(p);
    });
    double lhs = sum.value() / static_cast<double>(spec.volume);
    double bound = std::exp(1.0) * std::pow(2.0, i) * std::pow(static_cast<double>(i), 2 * i) /
                   std::pow(static_cast<double>(spec.degree), i);
    return ReturnProbabilityCheck{lhs, bound, lhs <= bound};
}

} // namespace hdtorus
