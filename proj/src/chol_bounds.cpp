#include "latmin/chol_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "latmin/lattice.hpp"
#include "latmin/rng.hpp"

namespace latmin {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kHalfPi = 1.5707963267948966;

SymmetricForm phi_chol(const std::vector<double>& beta, const std::vector<double>& u) {
    const int d = static_cast<int>(beta.size());
    Mat l(d, d);
    size_t k = 0;
    for (int i = 0; i < d; ++i) {
        l(i, i) = beta[i];
        for (int j = i + 1; j < d; ++j) l(i, j) = u[k++];
    }
    return SymmetricForm(transpose(l) * l);
}

}  // namespace

double jacobian_cholesky(const TriangularForm& l) {
    const int d = l.dim();
    double prod = std::pow(2.0, d);
    for (int i = 1; i <= d; ++i) prod *= std::pow(l(i - 1, i - 1), d - i + 1);
    return prod;
}

double jacobian_psi(const TriangularForm& h, double gamma, double c) {
    const int d = h.dim();
    Mat m = transpose(h.mat()) * h.mat();
    for (int i = 0; i < d; ++i) m(i, i) += gamma;
    // bare-pivot determinant: the constraint matrix is legitimately ill
    // conditioned (condition ~ c/gamma^d) and would trip the strict relative
    // pivot tolerance in cholesky()
    double det = 1.0;
    for (int i = 0; i < d; ++i) {
        double s = m(i, i);
        for (int k = 0; k < i; ++k) s -= m(k, i) * m(k, i);
        if (!(s > 0.0)) throw std::invalid_argument("jacobian_psi: not positive definite");
        det *= s;
        m(i, i) = std::sqrt(s);
        for (int j = i + 1; j < d; ++j) {
            double t = m(i, j);
            for (int k = 0; k < i; ++k) t -= m(k, i) * m(k, j);
            m(i, j) = t / m(i, i);
        }
    }
    if (std::fabs(det - c) > 1e-9 * c)
        throw std::invalid_argument("jacobian_psi: input is off the constraint manifold");
    double prod = std::pow(2.0, d - 1) * std::pow(c, -(d - 1.0) * (d + 2.0) / (2.0 * d));
    for (int i = 1; i <= d - 1; ++i) prod *= std::pow(h(i - 1, i - 1), d - i + 1);
    return prod;
}

IntegrationResult chol_diag_density(const DensityOnForms& f, const std::vector<double>& beta,
                                    double rel_tol, std::uint64_t mc_n, std::uint64_t seed) {
    const int d = f.dim;
    if (static_cast<int>(beta.size()) != d)
        throw std::invalid_argument("chol_diag_density: beta size must match density dim");
    double front = std::pow(2.0, d);
    for (int i = 1; i <= d; ++i) front *= std::pow(beta[i - 1], d - i + 1);

    const int p = d * (d - 1) / 2;
    IntegrationResult out;
    if (p == 0) {
        out.value = front * f.evaluate(phi_chol(beta, {}));
        out.converged = true;
        return out;
    }
    if (d == 2) {
        auto g = [&](double v) {
            const double c = std::cos(v);
            const double u = std::tan(v);
            return f.evaluate(phi_chol(beta, {u})) / (c * c);
        };
        out = integrate_1d(g, -kHalfPi, kHalfPi, rel_tol);
        out.value *= front;
        out.error_estimate *= front;
        return out;
    }
    // d >= 3: Gaussian-proposal Monte-Carlo over R^p
    Rng rng(seed, 0xc401);
    auto sampler = [&]() {
        McSample s;
        s.x.resize(p);
        double logw = 0.5 * p * std::log(2.0 * kPi);
        for (int i = 0; i < p; ++i) {
            s.x[i] = rng.gaussian();
            logw += 0.5 * s.x[i] * s.x[i];
        }
        s.weight = std::exp(logw);
        return s;
    };
    auto integrand = [&](const std::vector<double>& u) { return f.evaluate(phi_chol(beta, u)); };
    out = integrate_mc(integrand, sampler, mc_n);
    out.value *= front;
    out.error_estimate *= front;
    return out;
}

IntegrationResult chol_pivot_density(const DensityOnForms& f, double beta1, double rel_tol) {
    if (f.dim != 2)
        throw std::invalid_argument("chol_pivot_density: only d = 2 supported");
    auto g = [&](double beta2) {
        return chol_diag_density(f, {beta1, beta2}, rel_tol / 2.0).value;
    };
    return integrate_1d(g, 0.0, std::numeric_limits<double>::infinity(), rel_tol);
}

BoundPair theorem4_bounds(const DensityOnForms& f, double delta, double rel_tol) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("theorem4_bounds: delta must be in (0,1)");
    if (f.dim != 2)
        throw std::invalid_argument("theorem4_bounds: deterministic evaluation is d = 2 only");
    const double sd = std::sqrt(delta);
    BoundPair out;
    const double inf = std::numeric_limits<double>::infinity();
    if (!f.determinant_one) {
        auto gf = [&](double b1) { return chol_pivot_density(f, b1, rel_tol / 2.0).value; };
        IntegrationResult tail = integrate_1d(gf, sd, inf, rel_tol);
        if (!tail.converged) throw std::runtime_error("theorem4_bounds: pivot tail not converged");
        out.lower = std::clamp(1.0 - tail.value, 0.0, 1.0);
        out.lower_label = "1 - int g_f over (sqrt(delta), inf)";
        auto outer = [&](double b1) {
            auto inner = [&](double b2) {
                return chol_diag_density(f, {b1, b2}, rel_tol / 4.0).value;
            };
            return integrate_1d(inner, sd, inf, rel_tol / 2.0).value;
        };
        IntegrationResult box = integrate_1d(outer, sd, inf, rel_tol);
        if (!box.converged) throw std::runtime_error("theorem4_bounds: box tail not converged");
        out.upper = std::clamp(1.0 - box.value, 0.0, 1.0);
        out.upper_label = "1 - int G_f over (sqrt(delta), inf)^2";
    } else {
        // determinant-one slice: beta2 = 1/beta1 is fixed, the domain is the
        // interval sqrt(delta) < beta1 < 1/sqrt(delta)
        auto gf = [&](double b1) { return chol_diag_density(f, {b1, 1.0 / b1}, rel_tol / 2.0).value; };
        IntegrationResult seg = integrate_1d(gf, sd, 1.0 / sd, rel_tol);
        out.upper = std::clamp(1.0 - seg.value, 0.0, 1.0);
        out.upper_label = "1 - int over Delta_1(delta)";
        out.lower = 0.0;
        out.lower_defined = false;
        out.lower_label = "not evaluated on the determinant-one slice";
    }
    return out;
}

double multivariate_gamma(int d, double a) {
    double prod = std::pow(kPi, d * (d - 1) / 4.0);
    for (int j = 1; j <= d; ++j) prod *= std::tgamma(a + 0.5 * (1 - j));
    return prod;
}

DensityOnForms wishart_density(const WishartParams& params) {
    if (params.n < params.d)
        throw std::invalid_argument("wishart_density: need n >= d (density does not exist)");
    const int d = params.d;
    const int n = params.n;
    const SymmetricForm v = params.v;
    const double det_v = determinant(v);
    const double norm = std::pow(2.0, 0.5 * n * d) * std::pow(det_v, 0.5 * n) *
                        multivariate_gamma(d, 0.5 * n);
    // V^{-1} once
    const TriangularForm lv = cholesky(v);
    Mat vinv(d, d);
    for (int col = 0; col < d; ++col) {
        std::vector<double> y(d, 0.0);
        for (int i = 0; i < d; ++i) {
            double s = (i == col) ? 1.0 : 0.0;
            for (int k = 0; k < i; ++k) s -= lv(k, i) * y[k];
            y[i] = s / lv(i, i);
        }
        std::vector<double> x(d, 0.0);
        for (int i = d - 1; i >= 0; --i) {
            double s = y[i];
            for (int k = i + 1; k < d; ++k) s -= lv(i, k) * x[k];
            x[i] = s / lv(i, i);
        }
        for (int i = 0; i < d; ++i) vinv(i, col) = x[i];
    }

    DensityOnForms out;
    out.dim = d;
    out.determinant_one = false;
    out.evaluate = [d, n, vinv, norm](const SymmetricForm& q) -> double {
        double det_q;
        try {
            det_q = determinant(q);
        } catch (const std::invalid_argument&) {
            return 0.0;  // outside the positive definite support
        }
        double trace = 0.0;
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) trace += vinv(i, k) * q(k, i);
        return std::pow(det_q, 0.5 * (n - d - 1)) * std::exp(-0.5 * trace) / norm;
    };
    return out;
}

BoundPair wishart_J1_J2(double delta) {
    if (!(delta >= 0.0)) throw std::invalid_argument("wishart_J1_J2: need delta >= 0");
    BoundPair out;
    out.lower = 1.0 - std::exp(-0.5 * delta);
    out.lower_label = "J1 closed form";
    const double sd = std::sqrt(delta);
    auto tail = [](double t) { return std::exp(-0.5 * t * t); };
    const double gauss_tail =
        std::sqrt(2.0 / kPi) *
        integrate_1d(tail, sd, std::numeric_limits<double>::infinity(), 1e-10).value;
    out.upper = 1.0 - std::exp(-0.5 * delta) * gauss_tail;
    out.upper_label = "J2 via Gaussian tail quadrature";
    return out;
}

}  // namespace latmin
