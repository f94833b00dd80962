#include <doctest.h>

#include <cmath>
#include <vector>

#include "latmin/chol_bounds.hpp"
#include "latmin/lattice.hpp"
#include "latmin/rng.hpp"
#include "latmin/sampling.hpp"

using namespace latmin;

namespace {
constexpr double kPi = 3.141592653589793238462643383279;

TriangularForm upper2(double a, double b, double c) {
    Mat m(2, 2);
    m(0, 0) = a;
    m(0, 1) = b;
    m(1, 1) = c;
    return TriangularForm(std::move(m));
}

DensityOnForms standard_wishart() {
    WishartParams wp{2, 2, SymmetricForm(Mat::identity(2))};
    return wishart_density(wp);
}

// determinant of the 3x3 finite-difference Jacobian of (l11,l12,l22)->(q11,q12,q22)
double fd_cholesky_jacobian(const TriangularForm& l) {
    const double h = 1e-6;
    auto image = [](const TriangularForm& t) {
        SymmetricForm q = t.gram();
        return std::vector<double>{q(0, 0), q(0, 1), q(1, 1)};
    };
    Mat j(3, 3);
    const double base[3] = {l(0, 0), l(0, 1), l(1, 1)};
    for (int k = 0; k < 3; ++k) {
        double up[3] = {base[0], base[1], base[2]};
        double dn[3] = {base[0], base[1], base[2]};
        up[k] += h;
        dn[k] -= h;
        std::vector<double> fu = image(upper2(up[0], up[1], up[2]));
        std::vector<double> fd = image(upper2(dn[0], dn[1], dn[2]));
        for (int r = 0; r < 3; ++r) j(r, k) = (fu[r] - fd[r]) / (2.0 * h);
    }
    return std::fabs(j(0, 0) * (j(1, 1) * j(2, 2) - j(1, 2) * j(2, 1)) -
                     j(0, 1) * (j(1, 0) * j(2, 2) - j(1, 2) * j(2, 0)) +
                     j(0, 2) * (j(1, 0) * j(2, 1) - j(1, 1) * j(2, 0)));
}

}  // namespace

TEST_CASE("cholesky jacobian formula") {
    CHECK(jacobian_cholesky(upper2(1.0, 0.0, 1.0)) == doctest::Approx(4.0));
    CHECK(jacobian_cholesky(upper2(2.0, 0.0, 3.0)) == doctest::Approx(48.0));
    Rng rng(31, 0);
    for (int trial = 0; trial < 100; ++trial) {
        TriangularForm l =
            upper2(rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0), rng.uniform(0.5, 2.0));
        CHECK(jacobian_cholesky(l) == doctest::Approx(fd_cholesky_jacobian(l)).epsilon(1e-6));
    }
}

TEST_CASE("constrained chart jacobian") {
    // h11 = 1, gamma = 1, c = 4: manifold membership via v = 0, w = 1
    TriangularForm h = upper2(1.0, 0.0, 1.0);
    CHECK(jacobian_psi(h, 1.0, 4.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(jacobian_psi(h, 1.0, 7.0), std::invalid_argument);  // off the manifold
}

TEST_CASE("constrained chart jacobian matches finite differences") {
    // d=2 chart map (h11, h12) -> (s11, s12) with s = c^{-1/2}(gamma I + ^T H H):
    // s11 and s12 depend only on (h11, h12), so the chart Jacobian is 2 c^{-1} h11^2.
    const double gamma = 0.7, c = 5.0;
    Rng rng(32, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const double u = rng.uniform(0.5, 1.8);
        const double v = rng.uniform(-1.0, 1.0);
        // solve w from the constraint (gamma+u^2)(gamma+v^2+w^2) - (uv)^2 = c
        const double w2 =
            (c - (gamma + u * u) * (gamma + v * v) + u * u * v * v) / (gamma + u * u);
        if (w2 <= 0.01) continue;
        TriangularForm h = upper2(u, v, std::sqrt(w2));
        const double analytic = jacobian_psi(h, gamma, c);
        const double step = 1e-6;
        auto s = [&](double a, double b) {
            return std::pair<double, double>{(gamma + a * a) / std::sqrt(c), a * b / std::sqrt(c)};
        };
        auto [s11p, s12p] = s(u + step, v);
        auto [s11m, s12m] = s(u - step, v);
        auto [t11p, t12p] = s(u, v + step);
        auto [t11m, t12m] = s(u, v - step);
        const double fd = std::fabs(((s11p - s11m) * (t12p - t12m) - (s12p - s12m) * (t11p - t11m)) /
                                    (4.0 * step * step));
        CHECK(analytic == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("wishart diagonal pushforward matches the closed form") {
    DensityOnForms f = standard_wishart();
    Rng rng(33, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const double b1 = rng.uniform(0.1, 2.0);
        const double b2 = rng.uniform(0.1, 2.0);
        IntegrationResult g = chol_diag_density(f, {b1, b2});
        const double expect =
            std::sqrt(2.0 / kPi) * b1 * std::exp(-0.5 * (b1 * b1 + b2 * b2));
        CHECK(g.value == doctest::Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("wishart pushforward densities integrate to one") {
    DensityOnForms f = standard_wishart();
    const double inf = std::numeric_limits<double>::infinity();
    auto outer = [&](double b1) {
        auto inner = [&](double b2) { return chol_diag_density(f, {b1, b2}, 1e-8).value; };
        return integrate_1d(inner, 0.0, inf, 1e-8).value;
    };
    IntegrationResult total = integrate_1d(outer, 0.0, inf, 1e-7);
    CHECK(total.value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("wishart first-pivot marginal matches the closed form") {
    DensityOnForms f = standard_wishart();
    for (double b1 : {0.2, 0.7, 1.3, 2.5}) {
        IntegrationResult g = chol_pivot_density(f, b1, 1e-9);
        CHECK(g.value == doctest::Approx(b1 * std::exp(-0.5 * b1 * b1)).epsilon(1e-7));
    }
}

TEST_CASE("closed-form bracket values") {
    BoundPair b = wishart_J1_J2(0.1);
    CHECK(std::fabs(b.lower - 0.049) <= 5e-4);
    CHECK(std::fabs(b.upper - 0.28) <= 5e-3);
    BoundPair b2 = wishart_J1_J2(0.01);
    CHECK(std::fabs(b2.lower - 4.99e-3) <= 5e-6);
    CHECK(std::fabs(b2.upper - 8.42e-2) <= 5e-5);
    CHECK(wishart_J1_J2(0.0).lower == doctest::Approx(0.0));
}

TEST_CASE("density bracket reproduces the closed forms") {
    DensityOnForms f = standard_wishart();
    for (double delta : {0.2, 0.01}) {
        BoundPair numeric = theorem4_bounds(f, delta);
        BoundPair closed = wishart_J1_J2(delta);
        CHECK(numeric.lower == doctest::Approx(closed.lower).epsilon(1e-4));
        CHECK(numeric.upper == doctest::Approx(closed.upper).epsilon(1e-4));
        CHECK(numeric.lower <= numeric.upper);
    }
}

TEST_CASE("multivariate gamma") {
    CHECK(multivariate_gamma(2, 1.0) == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(multivariate_gamma(1, 2.5) == doctest::Approx(std::tgamma(2.5)).epsilon(1e-12));
}

TEST_CASE("wishart density reduces to chi-squared at d = 1") {
    WishartParams wp{1, 3, SymmetricForm(Mat::identity(1))};
    DensityOnForms f = wishart_density(wp);
    for (double q : {0.5, 1.0, 2.0, 5.0}) {
        Mat m(1, 1);
        m(0, 0) = q;
        const double expect = std::pow(q, 0.5) * std::exp(-0.5 * q) /
                              (std::pow(2.0, 1.5) * std::tgamma(1.5));
        CHECK(f.evaluate(SymmetricForm(std::move(m))) == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("density vanishes outside the positive definite cone") {
    DensityOnForms f = standard_wishart();
    Mat m(2, 2);
    m(0, 0) = 1.0;
    m(0, 1) = m(1, 0) = 3.0;
    m(1, 1) = 1.0;
    CHECK(f.evaluate(SymmetricForm(std::move(m))) == doctest::Approx(0.0));
}

TEST_CASE("short-vector lemma: large diagonal forbids small minima") {
    Rng rng(34, 0);
    const double eta = 0.8;
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 2 + trial % 2;
        Mat lm(d, d);
        for (int i = 0; i < d; ++i) {
            lm(i, i) = rng.uniform(eta * 1.01, 3.0);
            for (int j = i + 1; j < d; ++j) lm(i, j) = rng.uniform(-1.0, 1.0);
        }
        TriangularForm l(std::move(lm));
        CHECK(lattice_minimum(l.gram()).value > eta * eta);
    }
}

TEST_CASE("short-vector lemma converse: small minimum needs a small first pivot") {
    Rng rng(35, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 2 + trial % 2;
        Mat lm(d, d);
        for (int i = 0; i < d; ++i) {
            lm(i, i) = rng.uniform(0.2, 2.0);
            for (int j = i + 1; j < d; ++j) lm(i, j) = rng.uniform(-1.0, 1.0);
        }
        TriangularForm l(std::move(lm));
        const double eta = 0.9;
        if (lattice_minimum(l.gram()).value > eta * eta) {
            CHECK(l(0, 0) > eta);
        }
    }
}
