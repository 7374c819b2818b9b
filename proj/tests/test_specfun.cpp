#include <doctest.h>

#include "spiral/specfun.hpp"
#include "spiral/errors.hpp"
#include "oracles.hpp"

#include <cmath>
#include <vector>

using namespace spiral;

namespace {
const double euler_gamma = 0.57721566490153286061;

std::vector<double> log_grid(double lo, double hi, int n)
{
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return g;
}
} // namespace

TEST_SUITE("specfun") {

TEST_CASE("quadrature oracle is stable to 1e-13 under refinement")
{
    for (double z : {0.5, 1.0, 5.0, 20.0}) {
        auto [v0, rel0] = oracle::bessel_K_refined(0, z);
        auto [v1, rel1] = oracle::bessel_K_refined(1, z);
        CHECK(v0 > 0.0);
        CHECK(v1 > 0.0);
        CHECK(rel0 <= 1e-13);
        CHECK(rel1 <= 1e-13);
    }
}

TEST_CASE("K0 and K1 match the integral-representation oracle")
{
    for (double z : log_grid(1e-3, 30.0, 40)) {
        const double k0 = bessel_K0(z);
        const double k1 = bessel_K1(z);
        CHECK(std::abs(k0 - oracle::bessel_K(0, z)) <= 1e-10 * std::abs(k0));
        CHECK(std::abs(k1 - oracle::bessel_K(1, z)) <= 1e-10 * std::abs(k1));
    }
    // The two pinned single-point checks.
    CHECK(bessel_K0(1.0) == doctest::Approx(oracle::bessel_K(0, 1.0)).epsilon(1e-12));
    CHECK(bessel_K1(1.0) == doctest::Approx(oracle::bessel_K(1, 1.0)).epsilon(1e-12));
}

TEST_CASE("I1 matches its quadrature oracle")
{
    for (double z : log_grid(1e-3, 30.0, 25))
        CHECK(bessel_I1(z) == doctest::Approx(oracle::bessel_I1(z)).epsilon(1e-12));
}

TEST_CASE("small-argument behavior")
{
    // K0(z) ~ -log(z/2) - gamma_e
    const double z = 1e-6;
    CHECK(std::abs(bessel_K0(z) + std::log(0.5 * z) + euler_gamma) <= 1e-10);
    // z K1(z) -> 1
    CHECK(z * bessel_K1(z) == doctest::Approx(1.0).epsilon(1e-10));
    // I1(0) = 0 exactly; I1(z)/(z/2) -> 1
    CHECK(bessel_I1(0.0) == 0.0);
    CHECK(bessel_I1(z) / (0.5 * z) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("large-argument envelopes at z = 10")
{
    const double pi = 3.14159265358979323846;
    const double envelope = std::sqrt(pi / 20.0) * std::exp(-10.0);
    // The leading correction to the envelope is -1/(8z) for K0 and +3/(8z)
    // for K1, i.e. 1.25% resp. 3.75% at z = 10; the envelope check must sit
    // just above those exact deviations.
    CHECK(std::abs(bessel_K0(10.0) / envelope - 1.0) < 0.02);
    CHECK(std::abs(bessel_K1(10.0) / envelope - 1.0) < 0.04);
    // Sharper: the measured deviation agrees with the two-term correction.
    CHECK(bessel_K0(10.0) / envelope ==
          doctest::Approx(1.0 - 1.0 / 80.0 + 9.0 / 12800.0).epsilon(2e-4));
    CHECK(bessel_K1(10.0) / envelope ==
          doctest::Approx(1.0 + 3.0 / 80.0 - 15.0 / 12800.0).epsilon(5e-4));
}

TEST_CASE("Wronskian of I1, K1 equals 1/r")
{
    for (double r : {0.5, 1.0, 5.0}) {
        const double i1p = bessel_I0(r) - bessel_I1(r) / r;
        const double k1p = -bessel_K0(r) - bessel_K1(r) / r;
        const double w = i1p * bessel_K1(r) - bessel_I1(r) * k1p;
        CHECK(w * r == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("ratio K1/K0")
{
    // Three-term large-argument form at z = 100.
    const double three_term = 1.0 + 1.0 / 200.0 - 1.0 / 80000.0;
    CHECK(std::abs(bessel_ratio_K1_K0(100.0) - three_term) <= 1e-5);
    // Against the quadrature oracle at z = 1.
    const double expect = oracle::bessel_K(1, 1.0) / oracle::bessel_K(0, 1.0);
    CHECK(bessel_ratio_K1_K0(1.0) == doctest::Approx(expect).epsilon(1e-12));
    // Divergence as z -> 0+.
    CHECK(bessel_ratio_K1_K0(1e-8) > 1e6);
    // No cancellation/underflow at very large argument: stays ~ 1 + 1/(2z).
    CHECK(bessel_ratio_K1_K0(5000.0) == doctest::Approx(1.0 + 1.0 / 10000.0).epsilon(1e-7));
}

TEST_CASE("derivative recurrence K1' = -K0 - K1/z by central differences")
{
    const double h = 1e-5;
    for (double z = 0.5; z <= 20.0; z += 0.25) {
        const double cd = (bessel_K1(z + h) - bessel_K1(z - h)) / (2.0 * h);
        const double rec = -bessel_K0(z) - bessel_K1(z) / z;
        CHECK(std::abs(cd - rec) <= 1e-6);
    }
}

TEST_CASE("monotonicity on a log grid")
{
    const auto g = log_grid(1e-3, 30.0, 200);
    for (std::size_t i = 1; i < g.size(); ++i) {
        CHECK(bessel_K0(g[i]) < bessel_K0(g[i - 1]));
        CHECK(bessel_K1(g[i]) < bessel_K1(g[i - 1]));
        CHECK(bessel_I1(g[i]) > bessel_I1(g[i - 1]));
    }
}

TEST_CASE("branches agree at the switch point")
{
    const double z = bessel_regime_switch;
    using namespace specfun_detail;
    CHECK(std::abs(k0_scaled_inner(z) - k0_scaled_outer(z)) <= 1e-9 * k0_scaled_outer(z));
    CHECK(std::abs(k1_scaled_inner(z) - k1_scaled_outer(z)) <= 1e-9 * k1_scaled_outer(z));
    CHECK(std::abs(i0_scaled_inner(z) - i0_scaled_outer(z)) <= 1e-9 * i0_scaled_outer(z));
    CHECK(std::abs(i1_scaled_inner(z) - i1_scaled_outer(z)) <= 1e-9 * i1_scaled_outer(z));
}

TEST_CASE("regime tags follow the branch actually used")
{
    CHECK(bessel_K0_eval(7.5).regime == BesselRegime::series);
    CHECK(bessel_K0_eval(8.0).regime == BesselRegime::crossover);
    CHECK(bessel_K0_eval(8.5).regime == BesselRegime::asymptotic);
    CHECK(bessel_K1_eval(1.0).regime == BesselRegime::series);
    CHECK(bessel_I1_eval(20.0).regime == BesselRegime::asymptotic);
}

TEST_CASE("domain and range errors are typed")
{
    CHECK_THROWS_AS(bessel_K0(0.0), domain_error);
    CHECK_THROWS_AS(bessel_K0(-1.0), domain_error);
    CHECK_THROWS_AS(bessel_K1(-2.0), domain_error);
    CHECK_THROWS_AS(bessel_I1(-0.5), domain_error);
    CHECK_THROWS_AS(bessel_ratio_K1_K0(0.0), domain_error);
    CHECK_THROWS_AS(bessel_I1(701.0), range_error);
    CHECK_THROWS_AS(bessel_K0(701.0), range_error);
    // Below the cap everything is finite.
    CHECK(std::isfinite(bessel_I1(699.0)));
}

TEST_CASE("values are finite and positive across the working range")
{
    for (double z : log_grid(1e-3, 30.0, 300)) {
        for (double v : {bessel_K0(z), bessel_K1(z), bessel_I1(z), bessel_I0(z)}) {
            CHECK(std::isfinite(v));
            CHECK(v > 0.0);
        }
    }
}

} // TEST_SUITE
