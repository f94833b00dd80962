#include "latmin/sampling.hpp"

#include <cmath>
#include <stdexcept>

#include "latmin/lattice.hpp"

namespace latmin {

Mat haar_orthogonal(int d, Rng& rng, bool full_group) {
    if (d < 1) throw std::invalid_argument("haar_orthogonal: d must be >= 1");
    Mat g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = rng.gaussian();

    // Householder QR of g; accumulate Q explicitly.
    Mat r = g;
    Mat q = Mat::identity(d);
    for (int k = 0; k < d; ++k) {
        double norm = 0.0;
        for (int i = k; i < d; ++i) norm += r(i, k) * r(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        const double alpha = r(k, k) >= 0 ? -norm : norm;
        std::vector<double> v(d, 0.0);
        v[k] = r(k, k) - alpha;
        for (int i = k + 1; i < d; ++i) v[i] = r(i, k);
        double vnorm2 = 0.0;
        for (int i = k; i < d; ++i) vnorm2 += v[i] * v[i];
        if (vnorm2 == 0.0) continue;
        for (int j = 0; j < d; ++j) {  // r <- (I - 2 v v^T / v^T v) r
            double s = 0.0;
            for (int i = k; i < d; ++i) s += v[i] * r(i, j);
            s *= 2.0 / vnorm2;
            for (int i = k; i < d; ++i) r(i, j) -= s * v[i];
        }
        for (int j = 0; j < d; ++j) {  // q <- q (I - 2 v v^T / v^T v)
            double s = 0.0;
            for (int i = k; i < d; ++i) s += q(j, i) * v[i];
            s *= 2.0 / vnorm2;
            for (int i = k; i < d; ++i) q(j, i) -= s * v[i];
        }
    }
    // Sign correction: multiply column j of Q by sign(r_jj) so the
    // distribution is Haar rather than biased by the QR convention.
    for (int j = 0; j < d; ++j) {
        if (r(j, j) < 0.0)
            for (int i = 0; i < d; ++i) q(i, j) = -q(i, j);
    }
    // det(Q) is +-1; force +1 by flipping the last row, then optionally flip
    // back at random to cover both components of O_d.
    double det_sign = 1.0;
    {
        // determinant sign of an orthogonal matrix via LU-free small-d cofactor
        // expansion is overkill; use the product of R diagonal signs instead:
        // after sign correction Q R' = G with R' having positive diagonal, so
        // det(Q) = sign(det(G)).
        Mat lu = g;
        for (int k = 0; k < d; ++k) {
            int piv = k;
            for (int i = k + 1; i < d; ++i)
                if (std::fabs(lu(i, k)) > std::fabs(lu(piv, k))) piv = i;
            if (piv != k) {
                for (int j = 0; j < d; ++j) std::swap(lu(k, j), lu(piv, j));
                det_sign = -det_sign;
            }
            if (lu(k, k) == 0.0) continue;
            if (lu(k, k) < 0.0) det_sign = -det_sign;
            for (int i = k + 1; i < d; ++i) {
                const double f = lu(i, k) / lu(k, k);
                for (int j = k; j < d; ++j) lu(i, j) -= f * lu(k, j);
            }
        }
    }
    if (det_sign < 0.0)
        for (int j = 0; j < d; ++j) q(d - 1, j) = -q(d - 1, j);
    if (full_group && rng.uniform() < 0.5)
        for (int j = 0; j < d; ++j) q(d - 1, j) = -q(d - 1, j);
    return q;
}

SymmetricForm wishart_sample(const SymmetricForm& v, int n, Rng& rng) {
    const int d = v.dim();
    if (n < d) throw std::invalid_argument("wishart_sample: need degrees of freedom n >= d");
    const TriangularForm l = cholesky(v);  // v = ^T L L, so ^T L g ~ N(0, v)
    Mat s(d, d);
    for (int row = 0; row < n; ++row) {
        std::vector<double> g(d);
        for (int i = 0; i < d; ++i) g[i] = rng.gaussian();
        std::vector<double> x = transpose(l.mat()) * g;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) s(i, j) += x[i] * x[j];
    }
    return SymmetricForm(std::move(s));
}

std::vector<double> nu_epsilon_sample(const NuEpsilonParams& params, Rng& rng) {
    if (!(params.epsilon > 0.0 && params.epsilon < 1.0))
        throw std::invalid_argument("nu_epsilon_sample: epsilon must be in (0,1)");
    if (params.d < 2) throw std::invalid_argument("nu_epsilon_sample: d must be >= 2");
    const double le = std::log(params.epsilon);
    std::vector<double> alpha(params.d);
    double log_prod = 0.0;
    for (int i = 0; i + 1 < params.d; ++i) {
        const double li = rng.uniform(le, -le);
        alpha[i] = std::exp(li);
        log_prod += li;
    }
    alpha[params.d - 1] = std::exp(-log_prod);
    return alpha;
}

ManifoldSampler2::ManifoldSampler2(const ChannelParams& params, std::uint64_t seed,
                                   std::uint64_t stream)
    : params_(params), rng_(seed, stream), u_max_(detail::u_max_d2(params)) {
    if (params.d() != 2) throw std::invalid_argument("ManifoldSampler2: d must be 2");
    params.validate();
    // The surface measure splits its mass between u = O(sqrt(gamma)) and a
    // broad logarithmic range up to u_max; a uniform-u proposal would almost
    // never visit the small-u lobe and the importance weights would be wildly
    // heavy tailed. Draw u = u_max * s^k with s uniform instead, which spreads
    // samples roughly log-uniformly across scales.
    power_ = std::max(1.0, std::log(u_max_ / std::sqrt(params.gamma())));
}

ManifoldSampler2::Draw ManifoldSampler2::draw() {
    const double gamma = params_.gamma();
    const double c0 = params_.c0();
    const double sc = std::sqrt(c0);
    const double half_pi = 1.5707963267948966;
    const double s = rng_.uniform();
    const double u = u_max_ * std::pow(s, power_);
    const double phi = rng_.uniform(-half_pi, half_pi);
    const double a = std::sqrt((u * u + gamma) / sc);
    const double theta = detail::theta_of_a(params_, a);
    const double b = theta * std::sin(phi);

    // Build H = [[u, v], [0, w]] from the closed forms; reconstructing it by
    // re-factoring ^T L L would cancel catastrophically for a far from 1.
    const double theta_over_u = std::sqrt(std::max(0.0, (sc / (a * a) - gamma) / (gamma * sc)));
    const double v = sc * a * theta_over_u * std::sin(phi);
    const double w = std::sqrt(gamma * sc) * theta_over_u * std::cos(phi);

    Mat lm(2, 2);
    lm(0, 0) = a;
    lm(0, 1) = b;
    lm(1, 1) = 1.0 / a;
    TriangularForm l(std::move(lm));
    Mat hm(2, 2);
    hm(0, 0) = u;
    hm(0, 1) = v;
    hm(1, 1) = std::max(w, 1e-300);  // phi = +-pi/2 edge has measure zero
    TriangularForm h(std::move(hm));

    const std::vector<double> grad = g_gradient(h, params_);
    double gn = 0.0;
    for (double gi : grad) gn += gi * gi;
    gn = std::sqrt(gn);

    Draw out{a,
             b,
             h,
             l,
             // the (a, b)->(u, phi) change of variables folds the chart
             // density J~Gamma~ into c0^{5/4} a ||grad g|| / (2 sqrt(gamma)
             // (u^2+gamma)); the proposal density of (u, phi) is
             // 1 / (pi * u_max * k * s^(k-1)).
             std::pow(c0, 1.25) * a * gn / (2.0 * std::sqrt(gamma) * (u * u + gamma)) *
                 3.141592653589793 * u_max_ * power_ * std::pow(s, power_ - 1.0)};
    return out;
}

}  // namespace latmin
