#include "latmin/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "latmin/lattice.hpp"
#include "latmin/rng.hpp"
#include "latmin/sampling.hpp"

namespace latmin {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

Ellipsoid::Ellipsoid(std::vector<double> axes) : semi_axes(std::move(axes)) {
    if (semi_axes.empty()) throw std::invalid_argument("Ellipsoid: empty axis vector");
    for (double a : semi_axes)
        if (!(a > 0.0) || !std::isfinite(a))
            throw std::invalid_argument("Ellipsoid: semi-axes must be positive finite");
}

std::vector<double> Ellipsoid::sorted_axes() const {
    std::vector<double> s = semi_axes;
    std::sort(s.begin(), s.end());
    for (size_t i = 1; i < s.size(); ++i)
        if (s[i] <= s[i - 1]) s[i] = s[i - 1] + 1e-12 * static_cast<double>(i);
    return s;
}

double riemann_zeta(double s) {
    if (!(s > 1.0)) throw std::invalid_argument("riemann_zeta: need s > 1");
    const int n = 40;
    double sum = 0.0;
    for (int k = 1; k < n; ++k) sum += std::pow(k, -s);
    // Euler-Maclaurin tail from n, through the B6 term
    const double ns = std::pow(n, -s);
    sum += ns * n / (s - 1.0) + 0.5 * ns + s * ns / (12.0 * n) -
           s * (s + 1.0) * (s + 2.0) * ns / (720.0 * n * n * n) +
           s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * ns /
               (30240.0 * n * n * n * n * n);
    return sum;
}

double wallis(int k) {
    if (k < 0) throw std::invalid_argument("wallis: need k >= 0");
    return 0.5 * std::sqrt(kPi) *
           std::exp(std::lgamma(0.5 * (k + 1)) - std::lgamma(0.5 * (k + 2)));
}

double ball_volume(int d) { return std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0); }

double sphere_area(int d) { return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d); }

BoundPair km_bounds(int d, double delta) {
    if (d < 2) throw std::invalid_argument("km_bounds: need d >= 2");
    if (!(delta > 0.0)) throw std::invalid_argument("km_bounds: need delta > 0");
    BoundPair out;
    const double vd = ball_volume(d);
    const double main_term = vd / (2.0 * riemann_zeta(d)) * std::pow(delta, 0.5 * d);
    out.upper = std::min(1.0, main_term);
    out.upper_label = "V_d/(2 zeta(d)) delta^{d/2}";
    if (d >= 3) {
        const double cd = 1.0 / (riemann_zeta(d) * riemann_zeta(d - 1));
        out.lower = std::max(0.0, main_term - cd * vd * vd / 4.0 * std::pow(delta, d));
        out.lower_label = "main term - c_d V_d^2/4 delta^d";
    } else {
        out.lower = 0.0;
        out.lower_defined = false;
        out.lower_label = "unavailable (d=2 constant unspecified)";
    }
    return out;
}

HyperplaneSection intersect_hyperplane(const Ellipsoid& e, const std::vector<double>& v) {
    const int d = e.dim();
    if (static_cast<int>(v.size()) != d)
        throw std::invalid_argument("intersect_hyperplane: dimension mismatch");
    int pivot = 0;
    for (int i = 1; i < d; ++i)
        if (std::fabs(v[i]) > std::fabs(v[pivot])) pivot = i;
    if (v[pivot] == 0.0) throw std::invalid_argument("intersect_hyperplane: zero normal vector");
    if (d < 2) throw std::invalid_argument("intersect_hyperplane: need d >= 2");

    const std::vector<double>& alpha = e.semi_axes;

    // Projected-coordinate section Q = D (I + u u^T) D over coordinates != pivot.
    Mat q(d - 1, d - 1);
    {
        std::vector<double> u, dinv;
        for (int i = 0; i < d; ++i) {
            if (i == pivot) continue;
            u.push_back(alpha[i] * v[i] / (alpha[pivot] * v[pivot]));
            dinv.push_back(1.0 / alpha[i]);
        }
        for (int i = 0; i < d - 1; ++i)
            for (int j = 0; j < d - 1; ++j)
                q(i, j) = dinv[i] * ((i == j ? 1.0 : 0.0) + u[i] * u[j]) * dinv[j];
    }

    // In-plane semi-axes: restrict diag(alpha^{-2}) to an orthonormal basis of
    // the hyperplane and take inverse square roots of the eigenvalues.
    const double vn = norm2(v);
    std::vector<std::vector<double>> basis;
    basis.reserve(d - 1);
    for (int i = 0; i < d && static_cast<int>(basis.size()) < d - 1; ++i) {
        std::vector<double> w(d, 0.0);
        w[i] = 1.0;
        double c = v[i] / (vn * vn);
        for (int k = 0; k < d; ++k) w[k] -= c * v[k];
        for (const auto& b : basis) {
            const double pr = dot(w, b);
            for (int k = 0; k < d; ++k) w[k] -= pr * b[k];
        }
        const double wn = norm2(w);
        if (wn < 1e-10) continue;
        for (int k = 0; k < d; ++k) w[k] /= wn;
        basis.push_back(std::move(w));
    }
    if (static_cast<int>(basis.size()) != d - 1)
        throw std::runtime_error("intersect_hyperplane: failed to build hyperplane basis");
    Mat m(d - 1, d - 1);
    for (int i = 0; i < d - 1; ++i)
        for (int j = i; j < d - 1; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += basis[i][k] * basis[j][k] / (alpha[k] * alpha[k]);
            m(i, j) = m(j, i) = s;
        }
    std::vector<double> beta;
    if (d - 1 == 1) {
        beta.push_back(1.0 / std::sqrt(m(0, 0)));
    } else {
        SpectralDecomposition dec = spectral_decompose(SymmetricForm(std::move(m)));
        for (int i = d - 2; i >= 0; --i) beta.push_back(1.0 / std::sqrt(dec.eigenvalues[i]));
    }
    return HyperplaneSection{SymmetricForm(std::move(q)), std::move(beta)};
}

std::vector<double> reduced_axes(const Ellipsoid& e) {
    const std::vector<double> a = e.sorted_axes();
    const int d = static_cast<int>(a.size());
    const double ad = a[d - 1];
    if (!(ad > 1.0)) throw std::invalid_argument("reduced_axes: largest axis must exceed 1");
    std::vector<double> out(d - 1);
    for (int i = 0; i < d - 1; ++i)
        out[i] = std::sqrt(a[i] * a[i] * (ad * ad - 1.0) / (ad * ad - a[i] * a[i]));
    return out;
}

std::vector<double> reduced_axes_clamped(const Ellipsoid& e) {
    std::vector<double> out = reduced_axes(e);
    for (double& x : out) x = std::min(1.0, x);
    return out;
}

namespace {

double sigma_recursive(const std::vector<double>& axes_unsorted, double rel_tol, bool& converged);

// one recursion level over sorted strictly-increasing axes
double sigma_recursive_sorted(const std::vector<double>& a, double rel_tol, bool& converged) {
    const int d = static_cast<int>(a.size());
    if (a.front() >= 1.0) return 1.0;
    if (a.back() <= 1.0) return 0.0;
    if (d == 1) return a[0] >= 1.0 ? 1.0 : 0.0;  // covered above; kept for clarity
    std::vector<double> reduced(d - 1);
    const double ad = a[d - 1];
    for (int i = 0; i < d - 1; ++i)
        reduced[i] = std::sqrt(a[i] * a[i] * (ad * ad - 1.0) / (ad * ad - a[i] * a[i]));
    auto integrand = [&](double theta) {
        const double s = std::sin(theta);
        if (s <= 0.0) return 1.0;  // every scaled axis is +infinity
        std::vector<double> scaled(reduced);
        for (double& x : scaled) x /= s;
        return sigma_recursive(scaled, rel_tol / 2.0, converged) * std::pow(s, d - 2);
    };
    IntegrationResult r = integrate_1d(integrand, 0.0, kPi, rel_tol);
    if (!r.converged) converged = false;
    return r.value / (2.0 * wallis(d - 2));
}

double sigma_recursive(const std::vector<double>& axes_unsorted, double rel_tol, bool& converged) {
    std::vector<double> a = axes_unsorted;
    std::sort(a.begin(), a.end());
    for (size_t i = 1; i < a.size(); ++i)
        if (a[i] <= a[i - 1]) a[i] = a[i - 1] + 1e-12 * static_cast<double>(i);
    return sigma_recursive_sorted(a, rel_tol, converged);
}

}  // namespace

SphericalMeasure cap_measure_recursive(const Ellipsoid& e, double rel_tol) {
    SphericalMeasure out;
    const std::vector<double> a = e.sorted_axes();
    if (a.front() >= 1.0 || a.back() <= 1.0) {
        out.value = a.front() >= 1.0 ? 1.0 : 0.0;
        out.method = "exact-case";
        return out;
    }
    bool converged = true;
    out.value = std::clamp(sigma_recursive_sorted(a, rel_tol, converged), 0.0, 1.0);
    out.error_estimate = rel_tol * std::max(out.value, 1e-8);
    out.method = "recursion";
    out.converged = converged;
    return out;
}

namespace {
double arccos_clamped(double x) { return std::acos(std::min(1.0, std::max(0.0, x))); }
}

double cap_I(const std::vector<double>& alpha) {
    const int d = static_cast<int>(alpha.size());
    if (d < 2) throw std::invalid_argument("cap_I: need d >= 2");
    if (!(alpha.back() >= 1.0))
        throw std::invalid_argument("cap_I: undefined when the largest axis is < 1");
    double prod = std::pow(2.0, d) / sphere_area(d);
    for (int i = 2; i <= d; ++i) {
        const double lo = arccos_clamped(alpha[d - i]);  // b(alpha_{d-i+1})
        auto f = [i](double t) { return std::pow(std::sin(t), i - 2); };
        prod *= integrate_1d(f, lo, kPi / 2.0, 1e-10).value;
    }
    return prod;
}

double cap_L(const std::vector<double>& alpha) {
    const int d = static_cast<int>(alpha.size());
    if (d < 2) throw std::invalid_argument("cap_L: need d >= 2");
    double fact = 1.0;
    for (int j = 2; j < d; ++j) fact *= j;
    double prod = std::pow(2.0, d) / (fact * sphere_area(d));
    for (int j = 1; j <= d - 1; ++j)
        prod *= std::pow(kPi / 2.0, j) - std::pow(arccos_clamped(alpha[d - 1 - j]), j);
    return prod;
}

double envelope_a(int d) {
    double fact = 1.0;
    for (int j = 2; j < d; ++j) fact *= j;
    return std::pow(2.0, d) / (fact * sphere_area(d)) *
           std::pow(kPi / 2.0, (d - 2) * (d - 3) / 2.0);
}

double envelope_a_prime(int d) {
    return std::pow(2.0, d) / sphere_area(d) * std::pow(kPi / 2.0, d * (d - 1) / 2.0);
}

CapMeasureBounds cap_measure_bounds(const Ellipsoid& e) {
    const std::vector<double> a = e.sorted_axes();
    const int d = static_cast<int>(a.size());
    if (!(a.front() < 1.0 && a.back() > 1.0))
        throw std::invalid_argument("cap_measure_bounds: need min axis < 1 < max axis");
    const std::vector<double> red = reduced_axes_clamped(e);

    CapMeasureBounds out;
    {
        std::vector<double> lo = red, hi = red;
        for (double& x : lo) x /= std::sqrt(static_cast<double>(d - 1));
        lo.push_back(1.0);
        hi.push_back(1.0);
        out.tight.lower = cap_I(lo);
        out.tight.upper = std::min(1.0, cap_I(hi));
        out.tight.lower_label = "I_d(reduced/sqrt(d-1), 1)";
        out.tight.upper_label = "I_d(reduced, 1)";
    }
    {
        out.crude.upper = std::min(1.0, cap_I(a));
        out.crude.upper_label = "I_d(alpha)";
        if (a.back() >= std::sqrt(static_cast<double>(d))) {
            std::vector<double> lo = a;
            for (double& x : lo) x /= std::sqrt(static_cast<double>(d));
            out.crude.lower = cap_I(lo);
            out.crude.lower_label = "I_d(alpha/sqrt(d))";
        } else {
            out.crude.lower_defined = false;
            out.crude.lower_label = "undefined (max axis < sqrt(d))";
        }
    }
    {
        double plo = 1.0, phi = 1.0;
        for (int i = 0; i < d - 1; ++i) {
            plo *= std::min(1.0, red[i] / std::sqrt(static_cast<double>(d - 1)));
            phi *= red[i];  // already clamped at 1
        }
        out.envelope.lower = envelope_a(d) * plo;
        out.envelope.upper = std::min(1.0, envelope_a_prime(d) * phi);
        out.envelope.lower_label = "a(d) prod min{alpha_j,1}";
        out.envelope.upper_label = "a'(d) prod min{alpha_j,1}";
    }
    return out;
}

SphericalMeasure p_ellipsoid_mc(const Ellipsoid& e, std::uint64_t n_samples, std::uint64_t seed) {
    if (n_samples < 1000) throw std::invalid_argument("p_ellipsoid_mc: need n >= 1000");
    const int d = e.dim();
    Rng rng(seed, 0xe11);
    std::uint64_t hits = 0;
    for (std::uint64_t it = 0; it < n_samples; ++it) {
        const Mat p = haar_orthogonal(d, rng);
        Mat sigma(d, d);
        // ^T P diag(alpha^{-2}) P
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                double s = 0.0;
                for (int k = 0; k < d; ++k)
                    s += p(k, i) * p(k, j) / (e.semi_axes[k] * e.semi_axes[k]);
                sigma(i, j) = sigma(j, i) = s;
            }
        if (lattice_minimum(SymmetricForm(std::move(sigma))).value <= 1.0) ++hits;
    }
    SphericalMeasure out;
    const double freq = static_cast<double>(hits) / static_cast<double>(n_samples);
    out.value = freq;
    out.error_estimate = std::sqrt(std::max(freq * (1.0 - freq), 1.0 / n_samples) /
                                   static_cast<double>(n_samples));
    out.method = "monte-carlo";
    return out;
}

std::vector<std::vector<long long>> primitive_points_in_ball(int d, double radius,
                                                             std::uint64_t cap) {
    std::vector<std::vector<long long>> out;
    if (radius < 1.0) return out;
    const long long r = static_cast<long long>(std::floor(radius));
    const double r2 = radius * radius;
    std::vector<long long> x(d, -r);
    for (;;) {
        double norm2v = 0.0;
        for (long long xi : x) norm2v += static_cast<double>(xi) * static_cast<double>(xi);
        if (norm2v > 0.0 && norm2v <= r2) {
            long long g = 0;
            for (long long xi : x) g = std::gcd(g, xi < 0 ? -xi : xi);
            if (g == 1) {
                out.push_back(x);
                if (out.size() > cap)
                    throw std::length_error("primitive_points_in_ball: more than " +
                                            std::to_string(cap) + " points");
            }
        }
        int k = 0;
        while (k < d && x[k] == r) x[k++] = -r;
        if (k == d) break;
        ++x[k];
    }
    return out;
}

namespace {

// sigma-bar with the method ladder: recursion up to d = 4, bounds midpoint above
SphericalMeasure sigma_eval(const std::vector<double>& axes, double rel_tol) {
    Ellipsoid e(axes);
    const std::vector<double> a = e.sorted_axes();
    if (a.front() >= 1.0 || a.back() <= 1.0) {
        SphericalMeasure out;
        out.value = a.front() >= 1.0 ? 1.0 : 0.0;
        out.method = "exact-case";
        return out;
    }
    if (e.dim() <= 4) return cap_measure_recursive(e, rel_tol);
    CapMeasureBounds b = cap_measure_bounds(e);
    SphericalMeasure out;
    out.value = 0.5 * (b.tight.lower + b.tight.upper);
    out.error_estimate = 0.5 * (b.tight.upper - b.tight.lower);
    out.method = "bounds-midpoint";
    return out;
}

}  // namespace

SpectralEventBounds theorem2_bounds(const std::vector<double>& delta_axes, double delta,
                                    std::uint64_t mc_n, std::uint64_t seed, double rel_tol) {
    const int d = static_cast<int>(delta_axes.size());
    if (d < 2) throw std::invalid_argument("theorem2_bounds: need d >= 2");
    double prod = 1.0;
    for (double a : delta_axes) prod *= a;
    if (std::fabs(prod - 1.0) > 1e-9)
        throw std::invalid_argument("theorem2_bounds: axes must have product 1");
    if (!(delta > 0.0)) throw std::invalid_argument("theorem2_bounds: need delta > 0");

    const double sqrt_delta = std::sqrt(delta);
    std::vector<double> scaled(delta_axes);
    for (double& a : scaled) a *= sqrt_delta;

    SpectralEventBounds out;

    // upper bound: sum of cap measures over primitive points in the ball
    const double radius = sqrt_delta * *std::max_element(delta_axes.begin(), delta_axes.end());
    double fsum = 0.0;
    double fsum_err = 0.0;
    if (radius >= 1.0) {
        const auto points = primitive_points_in_ball(d, radius);
        out.primitive_terms = points.size();
        for (const auto& n : points) {
            double nn = 0.0;
            for (long long c : n) nn += static_cast<double>(c) * static_cast<double>(c);
            std::vector<double> axes(scaled);
            for (double& a : axes) a /= std::sqrt(nn);
            SphericalMeasure s = sigma_eval(axes, rel_tol);
            fsum += s.value;
            fsum_err += s.error_estimate;
            if (fsum >= 1.0) break;
        }
    }
    out.bounds.upper = std::min(1.0, fsum);
    out.bounds.upper_error = fsum_err;
    out.bounds.upper_label = "primitive-point cap sum";

    // lower bound: cap measure vs hyperplane-section integral (MC)
    SphericalMeasure cap = sigma_eval(scaled, rel_tol);
    out.lower_deterministic = cap.value;

    Rng rng(seed, 0x7e2);
    std::uint64_t hits = 0;
    for (std::uint64_t it = 0; it < mc_n; ++it) {
        std::vector<double> v(d);
        for (int i = 0; i < d; ++i) v[i] = rng.gaussian();
        const double vn = norm2(v);
        for (double& c : v) c /= vn;
        HyperplaneSection sec = intersect_hyperplane(Ellipsoid(scaled), v);
        bool hit;
        if (d - 1 == 1) {
            hit = sec.semi_axes[0] >= 1.0;  // interval of length 2 beta
        } else {
            // unbiased inner sample: a single Haar rotation decides the event
            const Mat p = haar_orthogonal(d - 1, rng);
            Mat sig(d - 1, d - 1);
            for (int i = 0; i < d - 1; ++i)
                for (int j = i; j < d - 1; ++j) {
                    double s = 0.0;
                    for (int k = 0; k < d - 1; ++k)
                        s += p(k, i) * p(k, j) / (sec.semi_axes[k] * sec.semi_axes[k]);
                    sig(i, j) = sig(j, i) = s;
                }
            hit = lattice_minimum(SymmetricForm(std::move(sig))).value <= 1.0;
        }
        if (hit) ++hits;
    }
    out.lower_mc = static_cast<double>(hits) / static_cast<double>(mc_n);
    out.lower_mc_error = std::sqrt(
        std::max(out.lower_mc * (1.0 - out.lower_mc), 1.0 / static_cast<double>(mc_n)) /
        static_cast<double>(mc_n));

    out.bounds.lower = std::max(out.lower_deterministic, out.lower_mc);
    out.bounds.lower_error = out.bounds.lower == out.lower_deterministic
                                 ? cap.error_estimate
                                 : out.lower_mc_error;
    out.bounds.lower_label = "max(cap measure, hyperplane integral)";
    return out;
}

Theorem3Result theorem3_bounds(int d, double eps, double delta, std::uint64_t mc_n,
                               std::uint64_t seed) {
    if (d < 2) throw std::invalid_argument("theorem3_bounds: need d >= 2");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("theorem3_bounds: eps in (0,1)");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("theorem3_bounds: delta in (0,1)");

    Theorem3Result out;
    if (delta <= std::pow(eps, 2.0 * (d - 1))) {
        out.exact_zero = true;
        return out;
    }
    const double log_eps_abs = std::fabs(2.0 * std::log(eps));
    out.c_d = envelope_a(d);
    {
        double fact = 1.0;
        for (int j = 2; j < d; ++j) fact *= j;
        fact *= (d - 1);  // (d-1)!
        out.c_d *= fact / std::pow(d * log_eps_abs, d - 1);
    }
    {
        double dfact = 1.0;
        for (int j = 2; j <= d; ++j) dfact *= j;
        out.C_d = std::pow(3.0, d - 1) * envelope_a_prime(d) * dfact * d /
                  std::pow(log_eps_abs, d - 1);
    }

    const double sd = std::sqrt(delta);
    if (d == 2) {
        // one-dimensional domain [eps, sqrt(delta)): closed forms
        out.s_d = sd * (sd - eps);
        out.S_d = delta * std::log(sd / eps);
    } else {
        // MC over the log-uniform box with the ordering/product constraints
        Rng rng(seed, 0x7e3);
        const double le = std::log(eps);
        double mean_s = 0.0, m2_s = 0.0, mean_S = 0.0, m2_S = 0.0;
        for (std::uint64_t it = 0; it < mc_n; ++it) {
            std::vector<double> a(d - 1);
            double weight = 1.0;  // 1/proposal-density, for Lebesgue integrals
            for (int i = 0; i < d - 1; ++i) {
                a[i] = std::exp(rng.uniform(le, -le));
                weight *= a[i] * log_eps_abs;
            }
            bool in_domain = true;
            for (int i = 0; i + 1 < d - 1; ++i)
                if (!(a[i] < a[i + 1])) in_domain = false;
            double prod = 1.0;
            for (double ai : a) prod *= ai;
            const double amax = a[d - 2];
            if (!(std::max(1.0 / sd, amax) < 1.0 / prod)) in_domain = false;
            double ys = 0.0, yS = 0.0;
            if (in_domain) {
                double ps = 1.0, pS = 1.0;
                for (double ai : a) {
                    ps *= std::min(sd, 1.0 / ai);
                    pS /= ai;
                }
                ys = weight * ps;
                yS = weight * std::pow(delta, 0.5 * d) * pS;
            }
            double dlt = ys - mean_s;
            mean_s += dlt / static_cast<double>(it + 1);
            m2_s += dlt * (ys - mean_s);
            dlt = yS - mean_S;
            mean_S += dlt / static_cast<double>(it + 1);
            m2_S += dlt * (yS - mean_S);
        }
        out.s_d = mean_s;
        out.S_d = mean_S;
        out.s_d_error = std::sqrt(m2_s / static_cast<double>(mc_n - 1) / static_cast<double>(mc_n));
        out.S_d_error = std::sqrt(m2_S / static_cast<double>(mc_n - 1) / static_cast<double>(mc_n));
    }

    out.lower = out.c_d * out.s_d;
    out.upper = std::min(1.0, out.C_d * out.S_d);

    double fact = 1.0;
    for (int j = 2; j <= d - 2; ++j) fact *= j;
    const double mn = std::min(sd, eps);
    out.s_d_envelope_lower = std::max(
        0.0, std::pow(mn, d - 1) * std::pow(log_eps_abs, d - 2) / fact *
                 (mn - std::pow(eps, d - 1)));
    out.S_d_envelope_upper = std::pow(delta, 0.5 * d) *
                             std::log(sd / std::pow(eps, d - 1)) *
                             std::pow(log_eps_abs, d - 2) / fact;
    return out;
}

}  // namespace latmin
