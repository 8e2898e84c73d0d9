#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hdtorus/errors.hpp"
#include "hdtorus/oracle.hpp"
#include "hdtorus/threshold.hpp"

using namespace hdtorus;

namespace {

// closed-form chi on the 4-cycle
double cycle4_chi(double p) {
    return 1.0 + 2.0 * (p + (1.0 - p) * p * p * p) + 2.0 * p * p - p * p * p * p;
}

ChiEvaluator cycle4_exact() {
    return [](double p) { return std::pair<double, double>(cycle4_chi(p), 0.0); };
}

double cycle4_root(double target) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (cycle4_chi(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("solver on exact evaluations converges to the root") {
    auto spec = TorusSpec::make(Family::NearestNeighbor, 4, 1);
    const double lambda = 2.0 / std::cbrt(4.0); // target chi = 2
    auto result = find_pc_with(spec, lambda, cycle4_exact(), 2e-6);
    CHECK(result.target == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(result.pc - cycle4_root(2.0)) <= 1e-6);
    CHECK(std::abs(result.pc - 0.353) <= 0.005);
    CHECK(result.lo <= result.pc);
    CHECK(result.pc <= result.hi);
}

TEST_CASE("bracketing invariant holds along the history") {
    auto spec = TorusSpec::make(Family::NearestNeighbor, 4, 1);
    const double lambda = 2.0 / std::cbrt(4.0);
    auto result = find_pc_with(spec, lambda, cycle4_exact());
    double lo = 0.0, hi = 1.0;
    for (const auto& e : result.evaluations) {
        CHECK(e.p == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-15));
        // chi(lo) - 2 se <= target <= chi(hi) + 2 se, with exact endpoints
        CHECK(cycle4_chi(lo) <= result.target + 1e-12);
        CHECK(cycle4_chi(hi) >= result.target - 1e-12);
        lo = e.lo_after;
        hi = e.hi_after;
    }
}

TEST_CASE("larger target moves the root up") {
    auto spec = TorusSpec::make(Family::NearestNeighbor, 4, 1);
    const double v13 = std::cbrt(4.0);
    auto small = find_pc_with(spec, 1.5 / v13, cycle4_exact());
    auto large = find_pc_with(spec, 3.0 / v13, cycle4_exact());
    CHECK(small.pc < large.pc);
}

TEST_CASE("domain errors for out-of-range targets") {
    auto spec = TorusSpec::make(Family::NearestNeighbor, 4, 1);
    const double v13 = std::cbrt(4.0);
    CHECK_THROWS_AS(find_pc_with(spec, 0.5 / v13, cycle4_exact()), DomainError); // target 0.5
    CHECK_THROWS_AS(find_pc_with(spec, 4.5 / v13, cycle4_exact()), DomainError); // target 4.5 >= V
    CHECK_THROWS_AS(find_pc(spec, 1.26, 10, 1), DomainError); // budget < 1000
}

TEST_CASE("oracle-backed evaluations on T_{2,3} match the solver contract") {
    auto spec = TorusSpec::make(Family::Hamming, 2, 3);
    auto eval = [&](double p) {
        return std::pair<double, double>(exact_observables(spec, p).chi, 0.0);
    };
    const double lambda = 3.0 / std::cbrt(8.0); // target chi = 3
    auto result = find_pc_with(spec, lambda, eval, 1e-7);
    CHECK(exact_observables(spec, result.pc).chi == doctest::Approx(3.0).epsilon(1e-5));
}

TEST_CASE("MC-backed solver is deterministic and lands near the target") {
    auto spec = TorusSpec::make(Family::Hamming, 2, 6); // V = 64
    auto a = find_pc(spec, 0.5, 2000, 11);
    auto b = find_pc(spec, 0.5, 2000, 11);
    CHECK(a.pc == b.pc);
    CHECK(a.evaluations.size() == b.evaluations.size());
    CHECK(std::abs(a.chi_at_pc - a.target) <= std::max(2.0 * a.chi_se, 0.05 * a.target));

    auto asy = pc_asymptotics_check(a, spec);
    CHECK(asy.p_omega == doctest::Approx(a.pc * 6.0));
    CHECK(asy.dev == doctest::Approx(std::abs(a.pc * 6.0 - 1.0)));
}

TEST_CASE("window scan rows") {
    auto spec = TorusSpec::make(Family::Hamming, 2, 6);
    auto pc = find_pc(spec, 0.5, 2000, 11);
    auto grid = default_epsilon_grid(spec, 0.5);
    CHECK(grid.front() == doctest::Approx(-1.0));
    CHECK(grid.back() == doctest::Approx(1.0));
    auto rows = window_scan(spec, 0.5, pc.pc, {0.5, -0.5, 0.0, -20.0}, 2000, 11);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].epsilon == -20.0);
    CHECK(rows[0].clamped); // p_c - 20/Omega < 0
    CHECK(rows[0].p == 0.0);
    CHECK(rows[1].epsilon == -0.5);
    for (size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].epsilon > rows[i - 1].epsilon);
        CHECK_FALSE(rows[i].clamped);
        CHECK(rows[i].chi >= 1.0);
        CHECK(rows[i].cmax >= 1.0);
        CHECK(rows[i].tail <= 1.0);
    }
    // chi at epsilon = 0 reproduces the solver value (same seed, same budget)
    for (const auto& row : rows)
        if (row.epsilon == 0.0) CHECK(std::abs(row.chi - pc.chi_at_pc) <= 4.0 * (row.chi_se + pc.chi_se) + 1e-9);
}
