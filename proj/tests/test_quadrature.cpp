#include <doctest.h>

#include <cmath>
#include <limits>

#include "latmin/quadrature.hpp"
#include "latmin/rng.hpp"

using namespace latmin;

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

TEST_CASE("constant integrand over a finite interval") {
    IntegrationResult r = integrate_1d([](double) { return 1.0; }, 0.0, kPi / 2.0, 1e-10);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(kPi / 2.0).epsilon(1e-12));
}

TEST_CASE("gaussian tail with infinite upper endpoint") {
    const double delta = 0.01;
    IntegrationResult r = integrate_1d([](double b) { return b * std::exp(-0.5 * b * b); },
                                       std::sqrt(delta), kInf, 1e-10);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(std::exp(-0.005)).epsilon(1e-10));
}

TEST_CASE("arcsine substitution handles inverse-square-root endpoints") {
    // int_{-1}^{1} db / sqrt(1 - b^2) = pi
    IntegrationResult r = integrate_arcsine([](double) { return 1.0; }, 1.0, 1e-10);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(kPi).epsilon(1e-12));
    // int_{-t}^{t} b^2 / sqrt(t^2-b^2) db = pi t^2 / 2
    const double t = 0.7;
    IntegrationResult r2 = integrate_arcsine([](double b) { return b * b; }, t, 1e-10);
    CHECK(r2.value == doctest::Approx(kPi * t * t / 2.0).epsilon(1e-10));
}

TEST_CASE("polynomials up to degree five are exact") {
    for (int deg = 0; deg <= 5; ++deg) {
        IntegrationResult r = integrate_1d([deg](double x) { return std::pow(x, deg); }, -1.0, 2.0,
                                           1e-10);
        const double expect = (std::pow(2.0, deg + 1) - std::pow(-1.0, deg + 1)) / (deg + 1);
        CHECK(r.value == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("halving the tolerance never worsens a smooth battery") {
    auto f = [](double x) { return std::exp(-x) * std::cos(3.0 * x); };
    const double exact = (1.0 - std::exp(-2.0) * (std::cos(6.0) - 3.0 * std::sin(6.0))) / 10.0;
    double prev_err = kInf;
    for (double tol = 1e-4; tol >= 1e-12; tol /= 2.0) {
        IntegrationResult r = integrate_1d(f, 0.0, 2.0, tol);
        const double err = std::fabs(r.value - exact);
        CHECK(err <= prev_err + 1e-15);
        prev_err = err;
    }
}

TEST_CASE("monte-carlo of the constant is exact") {
    Rng rng(1, 0);
    auto sampler = [&]() {
        McSample s;
        s.x = {rng.uniform()};
        return s;
    };
    IntegrationResult r = integrate_mc([](const std::vector<double>&) { return 1.0; }, sampler, 5000);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.error_estimate == doctest::Approx(0.0));
}

TEST_CASE("monte-carlo half-space indicator is one half") {
    Rng rng(2, 0);
    auto sampler = [&]() {
        McSample s;
        s.x = {rng.gaussian(), rng.gaussian()};
        return s;
    };
    auto f = [](const std::vector<double>& x) { return x[0] + x[1] > 0.0 ? 1.0 : 0.0; };
    IntegrationResult r = integrate_mc(f, sampler, 100000);
    CHECK(std::fabs(r.value - 0.5) <= 3.0 * r.error_estimate);
}

TEST_CASE("monte-carlo ball volume via cube sampling") {
    Rng rng(3, 0);
    auto sampler = [&]() {
        McSample s;
        s.x = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        s.weight = 8.0;  // Lebesgue volume of the cube
        return s;
    };
    auto f = [](const std::vector<double>& x) {
        return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] <= 1.0 ? 1.0 : 0.0;
    };
    IntegrationResult r = integrate_mc(f, sampler, 200000);
    CHECK(std::fabs(r.value - 4.0 * kPi / 3.0) <= 3.0 * r.error_estimate);
}

TEST_CASE("seeded monte-carlo replays bit-identically") {
    auto run = [] {
        Rng rng(42, 7);
        auto sampler = [&]() {
            McSample s;
            s.x = {rng.uniform()};
            return s;
        };
        return integrate_mc([](const std::vector<double>& x) { return x[0] * x[0]; }, sampler,
                            20000);
    };
    IntegrationResult a = run();
    IntegrationResult b = run();
    CHECK(a.value == b.value);
    CHECK(a.error_estimate == b.error_estimate);
}
