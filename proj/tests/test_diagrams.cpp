#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hdtorus/diagrams.hpp"
#include "hdtorus/errors.hpp"
#include "hdtorus/oracle.hpp"
#include "hdtorus/rng.hpp"
#include "hdtorus/spectral.hpp"

using namespace hdtorus;

namespace {

std::vector<double> delta_field(const TorusSpec& spec) {
    std::vector<double> d(static_cast<size_t>(spec.volume), 0.0);
    d[0] = 1.0;
    return d;
}

std::vector<double> tau_tilde_of(const TorusSpec& spec, const std::vector<double>& tau, double p) {
    auto tt = convolve(spec, step_distribution(spec), tau);
    for (auto& v : tt) v *= p * static_cast<double>(spec.degree);
    return tt;
}

} // namespace

TEST_CASE("triangle diagram basics") {
    auto spec = TorusSpec::make(Family::Hamming, 2, 3);
    auto nabla = triangle(spec, delta_field(spec));
    CHECK(nabla[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (index_t x = 1; x < spec.volume; ++x)
        CHECK(std::abs(nabla[static_cast<size_t>(x)]) < 1e-12);

    std::vector<double> ones(static_cast<size_t>(spec.volume), 1.0);
    for (double v : triangle(spec, ones))
        CHECK(v == doctest::Approx(64.0).epsilon(1e-12)); // V^2

    auto cycle4 = TorusSpec::make(Family::NearestNeighbor, 4, 1);
    auto oracle = exact_observables(cycle4, 0.5);
    CHECK(triangle(cycle4, oracle.tau)[0] == doctest::Approx(17626.0 / 4096.0).epsilon(1e-12));
}

TEST_CASE("triangle condition check") {
    auto spec = TorusSpec::make(Family::NearestNeighbor, 4, 1);
    auto nabla = triangle(spec, delta_field(spec));
    auto check = check_triangle_condition(nabla, 0.05, 1.0, spec.volume);
    CHECK(check.ok);
    CHECK(check.margin == doctest::Approx(13.0 * 0.05 + 10.0 / 4.0).epsilon(1e-9));

    // offdiag max 1.0 against 13*0.01 + 10*0.001 fails
    std::vector<double> bad{1.5, 1.0, 0.3, 1.0};
    CHECK_FALSE(check_triangle_condition(bad, 0.01, std::cbrt(0.004), 4).ok);
    // offdiag max 0.2 against 13*0.05 + 10*0.01 = 0.75 passes
    std::vector<double> fine{1.2, 0.2, 0.2, 0.2};
    CHECK(check_triangle_condition(fine, 0.05, std::cbrt(0.04), 4).ok);
    CHECK_THROWS_AS(check_triangle_condition(fine, 0.0, 1.0, 4), DomainError);
}

TEST_CASE("open triangles with a delta two-point function") {
    auto spec = TorusSpec::make(Family::Hamming, 3, 2);
    const double p = 0.17;
    auto ot = open_triangles(spec, delta_field(spec), p, 0.5 / static_cast<double>(spec.degree));
    CHECK(ot.t.value == doctest::Approx(p).epsilon(1e-12));
    CHECK(ot.t_prime.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ot.t_prime.arg == 0);
    CHECK(ot.t2 == doctest::Approx(1.0 / static_cast<double>(spec.degree)).epsilon(1e-12));
    auto d = step_distribution(spec);
    const double po = p * static_cast<double>(spec.degree);
    for (index_t x = 0; x < spec.volume; ++x)
        CHECK(ot.t_field[static_cast<size_t>(x)] ==
              doctest::Approx(po * d[static_cast<size_t>(x)]).epsilon(1e-12));
}

TEST_CASE("T' on the 4-cycle oracle field") {
    auto spec = TorusSpec::make(Family::NearestNeighbor, 4, 1);
    auto oracle = exact_observables(spec, 0.5);
    auto ot = open_triangles(spec, oracle.tau, 0.5, 0.2);
    CHECK(ot.t_prime.value == doctest::Approx(17626.0 / 4096.0).epsilon(1e-12));
    CHECK(ot.t_prime.arg == 0);
}

TEST_CASE("W: trivial and worked cases") {
    auto spec = TorusSpec::make(Family::NearestNeighbor, 4, 1);
    auto oracle = exact_observables(spec, 0.5);

    auto at_zero = wp(spec, oracle.tau, 0.5, 0);
    CHECK(std::abs(at_zero.w0) < 1e-12);
    CHECK(std::abs(at_zero.w.value) < 1e-12);

    // k = pi is dual index 2; W(0;pi) = 207/128
    CHECK(wp(spec, oracle.tau, 0.5, 2).w0 == doctest::Approx(207.0 / 128.0).epsilon(1e-12));

    // delta two-point function collapses the sum
    auto hm = TorusSpec::make(Family::Hamming, 3, 2);
    const double p = 0.4, po = p * static_cast<double>(hm.degree);
    auto d = step_distribution(hm);
    for (index_t k : {index_t{1}, index_t{4}, index_t{7}}) {
        auto report = wp(hm, delta_field(hm), p, k);
        for (index_t y = 0; y < hm.volume; ++y) {
            const double expect =
                (1.0 - std::cos(dual_dot(hm, k, y))) * po * d[static_cast<size_t>(y)];
            CHECK(wp_position(hm, delta_field(hm), p, k, y) ==
                  doctest::Approx(expect).epsilon(1e-12));
        }
        CHECK(report.w0 == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("spectral and position routes agree on oracle fields") {
    for (auto spec : {TorusSpec::make(Family::NearestNeighbor, 4, 1),
                      TorusSpec::make(Family::Hamming, 2, 3),
                      TorusSpec::make(Family::NearestNeighbor, 3, 2),
                      TorusSpec::make(Family::Hamming, 4, 1)}) {
        const double p = 0.3;
        auto oracle = exact_observables(spec, p);

        auto fast = triangle(spec, oracle.tau);
        auto slow = triangle_position(spec, oracle.tau);
        for (index_t x = 0; x < spec.volume; ++x)
            CHECK(std::abs(fast[static_cast<size_t>(x)] - slow[static_cast<size_t>(x)]) < 1e-9);

        auto ot = open_triangles(spec, oracle.tau, p, 0.3 / static_cast<double>(spec.degree));
        auto tt = tau_tilde_of(spec, oracle.tau, p);
        auto t_slow = convolve_position(spec, convolve_position(spec, oracle.tau, oracle.tau), tt);
        for (index_t x = 0; x < spec.volume; ++x)
            CHECK(std::abs(ot.t_field[static_cast<size_t>(x)] - t_slow[static_cast<size_t>(x)]) <
                  1e-9);

        for (index_t k = 0; k < spec.volume; ++k) {
            auto report = wp(spec, oracle.tau, p, k);
            double best = -1.0;
            for (index_t y = 0; y < spec.volume; ++y) {
                const double direct = wp_position(spec, oracle.tau, p, k, y);
                best = std::max(best, direct);
                if (y == 0) CHECK(std::abs(report.w0 - direct) < 1e-9);
            }
            CHECK(std::abs(report.w.value - best) < 1e-9);
        }
    }
}

TEST_CASE("H: trivial cases and dual-representation agreement") {
    auto spec = TorusSpec::make(Family::NearestNeighbor, 2, 2);
    auto oracle = exact_observables(spec, 0.3);

    // k = 0 kills the cosine weight
    auto zero = hp(spec, oracle.tau, 0.3, 0, HMode::Exact);
    CHECK(std::abs(zero.value) < 1e-12);

    // delta field forces t = u
    auto collapsed = hp(spec, delta_field(spec), 0.3, 3, HMode::Exact);
    CHECK(std::abs(collapsed.value) < 1e-12);

    for (index_t k = 1; k < spec.volume; ++k) {
        auto report = hp(spec, oracle.tau, 0.3, k, HMode::Exact);
        CHECK(report.max_rep_gap < 1e-9);
        CHECK_FALSE(report.sampled);
        CHECK(report.value >= 0.0);
    }

    // odd width exercises the joint phase
    auto z5 = TorusSpec::make(Family::NearestNeighbor, 5, 1);
    auto oracle5 = exact_observables(z5, 0.35);
    for (index_t k : {index_t{1}, index_t{2}}) {
        auto report = hp(z5, oracle5.tau, 0.35, k, HMode::Exact);
        CHECK(report.max_rep_gap < 1e-9);
        for (index_t a1 : {index_t{1}, index_t{3}})
            for (index_t a2 : {index_t{0}, index_t{2}})
                CHECK(hp_position(z5, oracle5.tau, 0.35, k, a1, a2) ==
                      doctest::Approx(hp_dual(z5, oracle5.tau, 0.35, k, a1, a2)).epsilon(1e-10));
    }

    auto big = TorusSpec::make(Family::Hamming, 2, 9);
    CHECK_THROWS_AS(hp(big, delta_field(big), 0.1, 1, HMode::Exact), SizeError);
}

TEST_CASE("H bound mode formula") {
    auto spec = TorusSpec::make(Family::Hamming, 2, 3);
    auto oracle = exact_observables(spec, 0.2);
    const double mu = 0.5 / static_cast<double>(spec.degree);
    auto ot = open_triangles(spec, oracle.tau, 0.2, mu);
    auto bound = hp(spec, oracle.tau, 0.2, 3, HMode::Bound, mu);
    const double expect =
        (1.0 - eval_dhat(spec, 3)) * std::pow(ot.s0, 5.0 / 3.0) * std::pow(ot.s32, 4.0 / 3.0);
    CHECK(bound.value == doctest::Approx(expect).epsilon(1e-12));
    CHECK_THROWS_AS(hp(spec, oracle.tau, 0.2, 3, HMode::Bound), DomainError);
}

TEST_CASE("expansion-order bounds") {
    auto n0 = pi_bound_eval(0, 0.1, 1.2, 0.3, 0.2, 0.05, 1.0);
    CHECK(n0.sum_bound == doctest::Approx(0.1));
    CHECK(n0.cos_bound == doctest::Approx(0.2));

    auto n1 = pi_bound_eval(1, 0.1, 1.2, 0.0, 0.0, 0.0, 1.0);
    CHECK(n1.sum_bound == doctest::Approx(1.2 * 0.24).epsilon(1e-12)); // T'(2TT')^1

    // N = 1 cosine bound takes the smaller of the two published forms
    auto n1c = pi_bound_eval(1, 0.1, 1.2, 0.2, 0.15, 0.0, 1.0);
    const double general = 7.0 * 1.2 * 0.2 * (0.2 + 2.0 * 1.0 * 1.2);
    const double special = 0.15 + 31.0 * 0.1 * 1.2 * 0.2;
    CHECK(n1c.cos_bound == doctest::Approx(std::min(general, special)).epsilon(1e-12));

    // N = 2 with T=0.1, T'=1, W=0.2, H=0.05, pOmega=1:
    // 11 * [ 0.2*(0.2 + 2*2*1)*0.2 + (0.01*0.2 + 0.05) ] = 11 * 0.22 = 2.42
    auto n2 = pi_bound_eval(2, 0.1, 1.0, 0.2, 0.0, 0.05, 1.0);
    CHECK(n2.cos_bound == doctest::Approx(2.42).epsilon(1e-12));

    CHECK_THROWS_AS(pi_bound_eval(1, -0.1, 1.0, 0.2, 0.1, 0.0, 1.0), DomainError);
}

TEST_CASE("remainder bound decreases once the geometric factor is below one") {
    const double t = 0.2, tp = 1.5, po = 1.0, chi = 3.0; // 2TT' = 0.6 < 1
    double previous = remainder_bound(1, t, tp, po, chi);
    for (int m = 2; m <= 6; ++m) {
        const double value = remainder_bound(m, t, tp, po, chi);
        CHECK(value <= previous + 1e-15);
        previous = value;
    }
}

TEST_CASE("diagram values grow with the two-point function") {
    auto spec = TorusSpec::make(Family::Hamming, 2, 3);
    const double p = 0.25;
    auto oracle = exact_observables(spec, p);

    RngStream rng(99, 0);
    auto bumped = oracle.tau;
    const index_t x = 1 + static_cast<index_t>(rng.next_u64() % (spec.volume - 1));
    bumped[static_cast<size_t>(x)] += 0.01;
    bumped[static_cast<size_t>(spec.vertex_neg(x))] = bumped[static_cast<size_t>(x)];

    auto base = open_triangles(spec, oracle.tau, p, 0.2 / static_cast<double>(spec.degree));
    auto more = open_triangles(spec, bumped, p, 0.2 / static_cast<double>(spec.degree));
    CHECK(more.t.value >= base.t.value - 1e-12);
    CHECK(more.t_prime.value >= base.t_prime.value - 1e-12);
    CHECK(more.t2 >= base.t2 - 1e-12);
    for (index_t k = 1; k < spec.volume; ++k) {
        CHECK(wp(spec, bumped, p, k).w.value >= wp(spec, oracle.tau, p, k).w.value - 1e-12);
        CHECK(hp(spec, bumped, p, k, HMode::Exact).value >=
              hp(spec, oracle.tau, p, k, HMode::Exact).value - 1e-12);
    }
}

TEST_CASE("spectrum preparation reports negative modes") {
    auto spec = TorusSpec::make(Family::NearestNeighbor, 4, 1);
    std::vector<double> noisy{1.0, 0.9, 0.0, 0.9}; // hat at k=2: 1 - 0.9 + 0 - 0.9 < 0
    auto prep = prepare_spectrum(spec, noisy);
    CHECK(prep.negative_count == 1);
    CHECK(prep.min_value == doctest::Approx(-0.8).epsilon(1e-12));
    CHECK(prep.tau[0] == 1.0);
}

TEST_CASE("diagram report composes the pieces") {
    auto spec = TorusSpec::make(Family::NearestNeighbor, 4, 1);
    auto oracle = exact_observables(spec, 0.5);
    auto report = diagram_report(spec, oracle.tau, 0.5, 1.26);
    CHECK(report.chi == doctest::Approx(41.0 / 16.0).epsilon(1e-12));
    CHECK(report.t_prime.value == doctest::Approx(17626.0 / 4096.0).epsilon(1e-12));
    CHECK(report.pi_bounds.size() == 6);
    CHECK(report.pi_bounds[0].sum_bound == doctest::Approx(report.t.value));
    CHECK(report.pi_bounds[0].cos_bound ==
          doctest::Approx(wp(spec, prepare_spectrum(spec, oracle.tau).tau, 0.5, 1).w0));
    CHECK(report.w_all.size() == 4);
    CHECK(report.nabla_max_offdiag.value < report.nabla[0]);
}
