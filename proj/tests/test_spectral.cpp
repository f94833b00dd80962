#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "latmin/quadrature.hpp"
#include "latmin/rng.hpp"
#include "latmin/spectral.hpp"

using namespace latmin;

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

TEST_CASE("riemann zeta values") {
    CHECK(riemann_zeta(2.0) == doctest::Approx(kPi * kPi / 6.0).epsilon(1e-13));
    CHECK(riemann_zeta(4.0) == doctest::Approx(std::pow(kPi, 4) / 90.0).epsilon(1e-13));
    CHECK(riemann_zeta(3.0) == doctest::Approx(1.2020569031595942854).epsilon(1e-13));
}

TEST_CASE("wallis integrals") {
    CHECK(wallis(0) == doctest::Approx(kPi / 2.0).epsilon(1e-13));
    CHECK(wallis(1) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(wallis(2) == doctest::Approx(kPi / 4.0).epsilon(1e-13));
    for (int k = 0; k <= 20; ++k) {
        IntegrationResult q = integrate_1d([k](double t) { return std::pow(std::sin(t), k); }, 0.0,
                                           kPi / 2.0, 1e-12);
        CHECK(wallis(k) == doctest::Approx(q.value).epsilon(1e-10));
    }
}

TEST_CASE("ball volume and sphere area") {
    CHECK(ball_volume(2) == doctest::Approx(kPi).epsilon(1e-13));
    CHECK(sphere_area(2) == doctest::Approx(2.0 * kPi).epsilon(1e-13));
    CHECK(ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-13));
}

TEST_CASE("invariant-measure bounds") {
    BoundPair b = km_bounds(3, 0.01);
    CHECK(b.upper == doctest::Approx(1.742343e-3).epsilon(1e-5));  // V_3/(2 zeta(3)) 1e-3
    CHECK(b.lower_defined);
    CHECK(b.lower <= b.upper);

    BoundPair b2 = km_bounds(2, 0.01);
    CHECK_FALSE(b2.lower_defined);

    // scaling law: upper / delta^{d/2} constant
    const double c1 = km_bounds(3, 1e-3).upper / std::pow(1e-3, 1.5);
    const double c2 = km_bounds(3, 1e-6).upper / std::pow(1e-6, 1.5);
    CHECK(c1 == doctest::Approx(c2).epsilon(1e-12));
}

TEST_CASE("hyperplane section of an ellipsoid") {
    Ellipsoid e({1.0, 2.0, 3.0});
    HyperplaneSection s = intersect_hyperplane(e, {0.0, 0.0, 1.0});
    REQUIRE(s.semi_axes.size() == 2);
    CHECK(s.semi_axes[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s.semi_axes[1] == doctest::Approx(2.0).epsilon(1e-10));

    Ellipsoid e2({1.0, 2.0});
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    HyperplaneSection s2 = intersect_hyperplane(e2, {inv_sqrt2, -inv_sqrt2});
    REQUIRE(s2.semi_axes.size() == 1);
    // line x = t(1,1)/sqrt(2) inside x^2 + y^2/4 <= 1 reaches t = sqrt(8/5)
    CHECK(s2.semi_axes[0] == doctest::Approx(std::sqrt(8.0 / 5.0)).epsilon(1e-10));

    CHECK_THROWS_AS(intersect_hyperplane(e, {0.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("section axes interlace the ellipsoid axes") {
    Rng rng(21, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 2 + trial % 3;
        std::vector<double> axes(d);
        for (double& a : axes) a = rng.uniform(0.2, 3.0);
        std::vector<double> v(d);
        for (double& c : v) c = rng.gaussian();
        Ellipsoid e(axes);
        std::vector<double> srt = e.sorted_axes();
        HyperplaneSection s = intersect_hyperplane(e, v);
        for (int i = 0; i + 1 < d; ++i) {
            CHECK(s.semi_axes[i] >= srt[i] * (1.0 - 1e-9));
            CHECK(s.semi_axes[i] <= srt[i + 1] * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("axis reduction") {
    std::vector<double> r = reduced_axes(Ellipsoid({0.5, 2.0}));
    CHECK(r[0] == doctest::Approx(std::sqrt(0.2)).epsilon(1e-12));
    std::vector<double> r2 = reduced_axes(Ellipsoid({1.0, 2.0}));
    CHECK(r2[0] == doctest::Approx(1.0).epsilon(1e-9));
    std::vector<double> rc = reduced_axes_clamped(Ellipsoid({1.5, 2.0}));
    CHECK(rc[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS(reduced_axes(Ellipsoid({0.3, 0.9})), std::invalid_argument);
}

TEST_CASE("cap measure recursion: exact cases and circle value") {
    CHECK(cap_measure_recursive(Ellipsoid({1.5, 2.0, 3.0})).value == doctest::Approx(1.0));
    CHECK(cap_measure_recursive(Ellipsoid({0.3, 0.9})).value == doctest::Approx(0.0));
    SphericalMeasure m = cap_measure_recursive(Ellipsoid({0.5, 2.0}));
    CHECK(m.value == doctest::Approx(2.0 * std::asin(std::sqrt(0.2)) / kPi).epsilon(1e-6));
}

TEST_CASE("cap measure is monotone in each axis") {
    Rng rng(22, 0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> axes = {rng.uniform(0.3, 0.95), rng.uniform(1.05, 3.0)};
        const double base = cap_measure_recursive(Ellipsoid(axes)).value;
        std::vector<double> bigger = axes;
        bigger[trial % 2] *= 1.2;
        CHECK(cap_measure_recursive(Ellipsoid(bigger)).value >= base - 1e-7);
    }
}

TEST_CASE("incomplete wallis products and envelope constants") {
    // d=2 closed form: I_2 = 2 arcsin(min(alpha_1,1))/pi
    CHECK(cap_I({0.4, 1.5}) == doctest::Approx(2.0 * std::asin(0.4) / kPi).epsilon(1e-8));
    CHECK(cap_I({1.0, 1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(envelope_a(2) == doctest::Approx(2.0 / kPi).epsilon(1e-12));
    CHECK(envelope_a_prime(2) == doctest::Approx(1.0).epsilon(1e-12));

    Rng rng(23, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2 + trial % 3;
        std::vector<double> alpha(d);
        for (int i = 0; i + 1 < d; ++i) alpha[i] = rng.uniform(0.2, 1.5);
        alpha[d - 1] = rng.uniform(1.0, 3.0);
        std::sort(alpha.begin(), alpha.end());
        if (alpha.back() < 1.0) alpha.back() = 1.0 + rng.uniform(0.0, 1.0);
        const double i_val = cap_I(alpha);
        const double l_val = cap_L(alpha);
        CHECK(i_val <= l_val * (1.0 + 1e-9));
        // sin t >= (2/pi) t applied to the factors of exponent 0..d-2 gives
        // the exponent (d-1)(d-2)/2; a plain d-2 is violated from d = 4 on
        CHECK(i_val >= l_val * std::pow(2.0 / kPi, (d - 1) * (d - 2) / 2) * (1.0 - 1e-9));
    }
}

TEST_CASE("cap bounds bracket the recursion") {
    Ellipsoid e({0.5, 2.0});
    const double v = cap_measure_recursive(e).value;
    CapMeasureBounds b = cap_measure_bounds(e);
    CHECK(b.tight.lower <= v * (1.0 + 1e-9));
    CHECK(b.tight.upper >= v * (1.0 - 1e-9));
    CHECK(b.envelope.lower <= v * (1.0 + 1e-9));
    CHECK(b.envelope.upper >= v * (1.0 - 1e-9));
    if (b.crude.lower_defined) CHECK(b.crude.lower <= v + 1e-9);
    CHECK(b.crude.upper >= v - 1e-9);
}

TEST_CASE("tight pair sits inside the crude pair") {
    Rng rng(24, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 2 + trial % 2;
        std::vector<double> alpha(d);
        for (int i = 0; i + 1 < d; ++i) alpha[i] = rng.uniform(0.2, 0.95);
        alpha[d - 1] = rng.uniform(std::sqrt(static_cast<double>(d)) + 0.05, 4.0);
        std::sort(alpha.begin(), alpha.end());
        CapMeasureBounds b = cap_measure_bounds(Ellipsoid(alpha));
        REQUIRE(b.crude.lower_defined);
        CHECK(b.tight.lower >= b.crude.lower - 1e-9);
        CHECK(b.tight.upper <= b.crude.upper + 1e-9);
    }
}

TEST_CASE("primitive points in a ball") {
    CHECK(primitive_points_in_ball(2, 0.5).empty());
    CHECK(primitive_points_in_ball(2, 1.0).size() == 4);
    // radius 2.2 excludes (+-2,+-1) and (+-1,+-2) since sqrt(5) > 2.2
    CHECK(primitive_points_in_ball(2, 2.2).size() == 8);
    CHECK(primitive_points_in_ball(2, 2.24).size() == 16);
    for (const auto& p : primitive_points_in_ball(3, 2.0)) {
        long long g = 0;
        for (long long v : p) g = std::gcd(g, std::llabs(v));
        CHECK(g == 1);
    }
}

TEST_CASE("rotation event frequency at the extremes") {
    SphericalMeasure none = p_ellipsoid_mc(Ellipsoid({0.4, 0.45}), 2000, 1);
    CHECK(none.value == doctest::Approx(0.0));
    SphericalMeasure all = p_ellipsoid_mc(Ellipsoid({10.0, 10.0}), 2000, 1);
    CHECK(all.value == doctest::Approx(1.0));
}

TEST_CASE("rotation event bounds structure") {
    // sqrt(delta) * max axis < 1: the primitive sum is empty, probability 0
    SpectralEventBounds small = theorem2_bounds({0.5, 2.0}, 0.2, 2000, 0);
    CHECK(small.bounds.upper == doctest::Approx(0.0));
    CHECK(small.primitive_terms == 0);

    SpectralEventBounds b = theorem2_bounds({0.5, 2.0}, 1.0, 5000, 0);
    CHECK(b.primitive_terms == 8);  // (+-1,0),(0,+-1),(+-1,+-1)
    CHECK(b.bounds.lower <= b.bounds.upper + 1e-12);
    CHECK(b.lower_deterministic ==
          doctest::Approx(cap_measure_recursive(Ellipsoid({0.5, 2.0})).value).epsilon(1e-6));
}

TEST_CASE("log-uniform measure bounds") {
    Theorem3Result zero = theorem3_bounds(2, 0.5, 0.25);
    CHECK(zero.exact_zero);

    Theorem3Result r = theorem3_bounds(2, 0.3, 0.2, 100000, 3);
    CHECK_FALSE(r.exact_zero);
    CHECK(r.lower <= r.upper + 1e-12);
    CHECK(r.s_d >= r.s_d_envelope_lower - 3.0 * r.s_d_error - 1e-12);
    CHECK(r.S_d <= r.S_d_envelope_upper + 3.0 * r.S_d_error + 1e-12);
    CHECK(r.c_d > 0.0);
    CHECK(r.C_d > 0.0);
}
