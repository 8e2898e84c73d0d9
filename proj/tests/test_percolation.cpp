#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hdtorus/errors.hpp"
#include "hdtorus/oracle.hpp"
#include "hdtorus/percolation.hpp"
#include "hdtorus/spectral.hpp"

using namespace hdtorus;

namespace {

McOptions options(long long samples, std::uint64_t seed, int workers = 0) {
    McOptions o;
    o.samples = samples;
    o.seed = seed;
    o.workers = workers;
    return o;
}

} // namespace

TEST_CASE("degenerate p is exact") {
    auto spec = TorusSpec::make(Family::Hamming, 2, 3);
    auto zero = estimate_observables(spec, 0.0, options(200, 9));
    CHECK(zero.clusters.chi == 1.0);
    CHECK(zero.clusters.cmax_mean == 1.0);
    CHECK(zero.two_point.tau[0] == 1.0);
    for (index_t x = 1; x < spec.volume; ++x) {
        CHECK(zero.two_point.tau[static_cast<size_t>(x)] == 0.0);
        CHECK(zero.pi0[static_cast<size_t>(x)] == 0.0);
    }
    CHECK(zero.pi0[0] == 0.0);

    auto one = estimate_observables(spec, 1.0, options(200, 9));
    CHECK(one.clusters.chi == doctest::Approx(8.0));
    CHECK(one.clusters.cmax_mean == doctest::Approx(8.0));
    for (index_t x = 0; x < spec.volume; ++x) {
        CHECK(one.two_point.tau[static_cast<size_t>(x)] == doctest::Approx(1.0));
        CHECK(one.pi0[static_cast<size_t>(x)] == doctest::Approx(x == 0 ? 0.0 : 1.0));
    }
}

TEST_CASE("single configuration sampling") {
    auto spec = TorusSpec::make(Family::NearestNeighbor, 4, 1);
    RngStream rng(3, 0);
    long long occupied = 0;
    const int reps = 40000;
    for (int i = 0; i < reps; ++i) {
        auto sample = sample_configuration(spec, 0.5, rng);
        for (auto o : sample.occupied) occupied += o;
        index_t total = 0;
        for (index_t x = 0; x < spec.volume; ++x)
            if (sample.cluster_root[static_cast<size_t>(x)] == x)
                total += sample.cluster_size[static_cast<size_t>(x)];
        CHECK(total == spec.volume);
    }
    // Binomial(4, 1/2) mean 2 per sample
    CHECK(static_cast<double>(occupied) / reps == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("4-cycle estimates match the oracle within 4 sigma") {
    auto spec = TorusSpec::make(Family::NearestNeighbor, 4, 1);
    auto oracle = exact_observables(spec, 0.5);
    auto mc = estimate_observables(spec, 0.5, options(100000, 2024));

    for (index_t x = 1; x < spec.volume; ++x) {
        const double se = mc.two_point.stderr_[static_cast<size_t>(x)];
        CHECK(se > 0.0);
        CHECK(std::abs(mc.two_point.tau[static_cast<size_t>(x)] -
                       oracle.tau[static_cast<size_t>(x)]) <= 4.0 * se);
        CHECK(std::abs(mc.pi0[static_cast<size_t>(x)] - oracle.pi0[static_cast<size_t>(x)]) <=
              4.0 * mc.pi0_se[static_cast<size_t>(x)]);
    }
    CHECK(std::abs(mc.clusters.chi - oracle.chi) <= 4.0 * mc.clusters.chi_se);
    CHECK(std::abs(mc.clusters.cmax_mean - oracle.cmax_mean) <= 4.0 * mc.clusters.cmax_se);
    CHECK(mc.clusters.tail_k[1] == 2);
    CHECK(std::abs(mc.clusters.tail[1] - oracle.tail[2]) <= 4.0 * mc.clusters.tail_se[1]);
}

TEST_CASE("internal consistency of the estimators") {
    auto spec = TorusSpec::make(Family::Hamming, 2, 3);
    auto mc = estimate_observables(spec, 0.3, options(20000, 77));

    // chi = sum_x tau(x) up to accumulated rounding
    double sum = 0.0;
    for (double t : mc.two_point.tau) sum += t;
    CHECK(mc.clusters.chi == doctest::Approx(sum).epsilon(1e-9));

    // exact symmetry and range
    for (index_t x = 0; x < spec.volume; ++x) {
        CHECK(mc.two_point.tau[static_cast<size_t>(x)] ==
              mc.two_point.tau[static_cast<size_t>(spec.vertex_neg(x))]);
        CHECK(mc.two_point.tau[static_cast<size_t>(x)] >= 0.0);
        CHECK(mc.two_point.tau[static_cast<size_t>(x)] <= 1.0);
    }
    CHECK(mc.two_point.tau[0] == 1.0);

    // tail starts at 1 and decreases
    CHECK(mc.clusters.tail[0] == doctest::Approx(1.0));
    for (size_t g = 1; g < mc.clusters.tail.size(); ++g)
        CHECK(mc.clusters.tail[g] <= mc.clusters.tail[g - 1] + 1e-12);
    CHECK(mc.clusters.cmax_mean <= static_cast<double>(spec.volume));

    // BK inequality: P(0 <=> x) <= tau^2, with stderr slack
    for (index_t x = 1; x < spec.volume; ++x) {
        const double t = mc.two_point.tau[static_cast<size_t>(x)];
        const double slack = 4.0 * (mc.pi0_se[static_cast<size_t>(x)] +
                                    2.0 * t * mc.two_point.stderr_[static_cast<size_t>(x)]);
        CHECK(mc.pi0[static_cast<size_t>(x)] <= t * t + slack);
    }

    // tau(x) <= p Omega (D * tau)(x) for x != 0, with stderr slack
    auto dtau = convolve(spec, step_distribution(spec), mc.two_point.tau);
    auto dse = convolve(spec, step_distribution(spec), mc.two_point.stderr_);
    const double po = 0.3 * static_cast<double>(spec.degree);
    for (index_t x = 1; x < spec.volume; ++x) {
        const double slack = 4.0 * (mc.two_point.stderr_[static_cast<size_t>(x)] +
                                    po * dse[static_cast<size_t>(x)]);
        CHECK(mc.two_point.tau[static_cast<size_t>(x)] <=
              po * dtau[static_cast<size_t>(x)] + slack);
    }
}

TEST_CASE("bit-identical across worker counts") {
    auto spec = TorusSpec::make(Family::NearestNeighbor, 3, 2);
    auto a = estimate_observables(spec, 0.4, options(1000, 5, 1));
    auto b = estimate_observables(spec, 0.4, options(1000, 5, 4));
    CHECK(a.two_point.tau == b.two_point.tau);
    CHECK(a.two_point.stderr_ == b.two_point.stderr_);
    CHECK(a.pi0 == b.pi0);
    CHECK(a.clusters.chi == b.clusters.chi);
    CHECK(a.clusters.chi_se == b.clusters.chi_se);
    CHECK(a.clusters.cmax_mean == b.clusters.cmax_mean);
    CHECK(a.clusters.cmax_samples == b.clusters.cmax_samples);
    CHECK(a.clusters.tail == b.clusters.tail);
}

TEST_CASE("coupled uniforms make chi exactly monotone in p") {
    auto spec = TorusSpec::make(Family::Hamming, 2, 4);
    double previous = 0.0;
    for (double p : {0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9}) {
        auto opts = options(500, 31);
        opts.two_point = false;
        opts.double_connectivity = false;
        auto mc = estimate_observables(spec, p, opts);
        CHECK(mc.clusters.chi >= previous);
        previous = mc.clusters.chi;
    }
}

TEST_CASE("input validation") {
    auto spec = TorusSpec::make(Family::NearestNeighbor, 4, 1);
    CHECK_THROWS_AS(estimate_observables(spec, -0.1, options(10, 1)), DomainError);
    CHECK_THROWS_AS(estimate_observables(spec, 0.5, options(0, 1)), DomainError);
}

TEST_CASE("sanitize pins, clamps and symmetrizes") {
    auto spec = TorusSpec::make(Family::NearestNeighbor, 5, 1);
    std::vector<double> raw{0.7, 0.5, 0.2, 0.3, 1.2};
    auto clean = sanitize_two_point(spec, raw);
    CHECK(clean[0] == 1.0);
    CHECK(clean[1] == doctest::Approx(0.85)); // mean of 0.5 and clamped 1.2
    CHECK(clean[4] == clean[1]);
    CHECK(clean[2] == doctest::Approx(0.25));
    CHECK(clean[3] == clean[2]);
}
