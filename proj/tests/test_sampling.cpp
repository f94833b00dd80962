#include <doctest.h>

#include <cmath>
#include <vector>

#include "latmin/integer_forcing.hpp"
#include "latmin/lattice.hpp"
#include "latmin/sampling.hpp"

using namespace latmin;

TEST_CASE("haar rotations are orthogonal") {
    Rng rng(1, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2 + trial % 4;
        Mat p = haar_orthogonal(d, rng);
        Mat ppt = p * transpose(p);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                CHECK(ppt(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-12));
    }
}

TEST_CASE("haar at d = 1 covers both signs evenly") {
    Rng rng(2, 0);
    int plus = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i)
        if (haar_orthogonal(1, rng)(0, 0) > 0.0) ++plus;
    const double freq = static_cast<double>(plus) / n;
    const double sigma = 0.5 / std::sqrt(static_cast<double>(n));
    CHECK(std::fabs(freq - 0.5) <= 3.0 * sigma);
}

TEST_CASE("haar first entry second moment is 1/d") {
    Rng rng(3, 0);
    const int n = 100000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = haar_orthogonal(3, rng)(0, 0);
        s += v * v;
        s2 += v * v * v * v;
    }
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::fabs(mean - 1.0 / 3.0) <= 3.0 * se);
}

TEST_CASE("wishart mean is n V and samples are positive definite") {
    SymmetricForm id2(Mat::identity(2));
    Rng rng(4, 0);
    const int n = 20000;
    double m00 = 0.0, m01 = 0.0, m11 = 0.0;
    for (int i = 0; i < n; ++i) {
        SymmetricForm w = wishart_sample(id2, 2, rng);
        m00 += w(0, 0);
        m01 += w(0, 1);
        m11 += w(1, 1);
        CHECK(w(0, 0) > 0.0);
        CHECK(w(0, 0) * w(1, 1) - w(0, 1) * w(0, 1) >= 0.0);
    }
    // var of a diagonal entry of W_2(I,2) is 2n = 4 per draw
    const double se_diag = std::sqrt(8.0 / n);
    CHECK(std::fabs(m00 / n - 2.0) <= 3.0 * se_diag);
    CHECK(std::fabs(m11 / n - 2.0) <= 3.0 * se_diag);
    CHECK(std::fabs(m01 / n) <= 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("wishart d = 1 diagonal is chi-squared") {
    SymmetricForm id1(Mat::identity(1));
    Rng rng(5, 0);
    const int n = 20000, dof = 5;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += wishart_sample(id1, dof, rng)(0, 0);
    const double se = std::sqrt(2.0 * dof / static_cast<double>(n));
    CHECK(std::fabs(s / n - dof) <= 3.0 * se);
}

TEST_CASE("wishart rejects n < d") {
    SymmetricForm id2(Mat::identity(2));
    Rng rng(6, 0);
    CHECK_THROWS_AS(wishart_sample(id2, 1, rng), std::invalid_argument);
}

TEST_CASE("log-uniform determinant-one sampler") {
    NuEpsilonParams params{3, 0.2};
    Rng rng(7, 0);
    const int n = 20000;
    double sum_log = 0.0, sum_log2 = 0.0;
    for (int i = 0; i < n; ++i) {
        std::vector<double> a = nu_epsilon_sample(params, rng);
        double prod = 1.0;
        for (double v : a) prod *= v;
        CHECK(prod == doctest::Approx(1.0).epsilon(1e-12));
        for (int k = 0; k + 1 < params.d; ++k) {
            CHECK(a[k] >= params.epsilon);
            CHECK(a[k] <= 1.0 / params.epsilon);
        }
        sum_log += std::log(a[0]);
        sum_log2 += std::log(a[0]) * std::log(a[0]);
    }
    const double mean = sum_log / n;
    const double se = std::sqrt((sum_log2 / n - mean * mean) / n);
    CHECK(std::fabs(mean) <= 3.0 * se);
}

TEST_CASE("manifold sampler stays on the manifold inside the norm window") {
    ChannelParams p;  // gamma 0.2, c0 = e^30/25
    ManifoldSampler2 sampler(p, 8);
    const double frob_lo = std::sqrt(p.c0()) - p.gamma();
    const double frob_hi = (p.c0() - p.gamma() * p.gamma()) / p.gamma();
    for (int i = 0; i < 10000; ++i) {
        ManifoldSampler2::Draw d = sampler.draw();
        CHECK(on_manifold(d.h, p));
        CHECK(d.l.unit_determinant(1e-9));
        const double fr = frobenius_norm_sq(d.h.mat());
        CHECK(fr >= frob_lo * (1.0 - 1e-9));
        CHECK(fr <= frob_hi * (1.0 + 1e-9));
        CHECK(d.weight >= 0.0);
    }
    CHECK(sampler.rejections() == 0);
}

TEST_CASE("manifold sampler weights average to the surface area") {
    ChannelParams p;
    const double kappa = kappa2(p, 'a');
    ManifoldSampler2 sampler(p, 9);
    const int n = 200000;
    double sw = 0.0, sw2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = sampler.draw().weight;
        sw += w;
        sw2 += w * w;
    }
    const double mean = sw / n;
    const double se = std::sqrt((sw2 / n - mean * mean) / n);
    CHECK(std::fabs(mean - kappa) <= 3.0 * se);
    CHECK(se / kappa < 0.02);  // the power-map proposal keeps weights well behaved
}

TEST_CASE("samplers replay bit-identically from the seed") {
    ChannelParams p;
    ManifoldSampler2 a(p, 123), b(p, 123);
    for (int i = 0; i < 100; ++i) {
        ManifoldSampler2::Draw da = a.draw(), db = b.draw();
        CHECK(da.a == db.a);
        CHECK(da.b == db.b);
        CHECK(da.weight == db.weight);
    }
    Rng r1(55, 1), r2(55, 1);
    for (int i = 0; i < 100; ++i) CHECK(r1.next_u64() == r2.next_u64());
}
