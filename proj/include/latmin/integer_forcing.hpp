#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "latmin/forms.hpp"
#include "latmin/quadrature.hpp"

namespace latmin {

// Channel ensemble description: m transmitters, n receivers, capacity C0
// (exponent of e; see snr-table --c0-units for the bits conversion) and SNR
// (linear). Derived quantities gamma = 1/SNR, c0 = gamma^m e^{C0}, d = min(m,n).
struct ChannelParams {
    int m = 2;
    int n = 2;
    double capacity = 30.0;  // exponent in c0 = gamma^m * e^capacity
    double snr = 5.0;

    double gamma() const { return 1.0 / snr; }
    int d() const { return m < n ? m : n; }
    double c0() const;
    double delta_star() const;  // gamma / c0^{1/d}
    void validate() const;      // throws unless c0 > gamma^d
};

// T factor (nonnegative diagonal) of the QR decomposition of a rectangular
// channel matrix; preserves the Gram matrix.
TriangularForm qr_reduce(const Mat& h_rect);

// H with ^T H H = c0^{1/d} ^T L L - gamma I, for unit-determinant L.
// Returns nullopt when a radicand goes nonpositive (point outside the chart
// image N*_d).
std::optional<TriangularForm> h_from_l(const TriangularForm& l, const ChannelParams& p);

// Cholesky factor of c0^{-1/d} (gamma I + ^T H H); unit determinant when H is
// on the capacity manifold det(gamma I + ^T H H) = c0.
TriangularForm l_from_h(const TriangularForm& h, const ChannelParams& p);

bool on_manifold(const TriangularForm& h, const ChannelParams& p, double rel_tol = 1e-9);

// g(T) = c0^{-1} det(gamma I + ^T T T) and its gradient over the
// upper-triangular entries (row-major order i <= j).
double g_constraint(const TriangularForm& t, const ChannelParams& p);
std::vector<double> g_gradient(const TriangularForm& t, const ChannelParams& p);
double g_dd_partial(const TriangularForm& t, const ChannelParams& p);

// ||grad g||_2 / |d_dd g|, the surface-measure density in the h_dd chart; >= 1.
double gamma_density(const TriangularForm& h, const ChannelParams& p);

// Surface area of the capacity manifold, d = 2 only. Method 'a' integrates the
// chart density over (h11, h12); method 'b' integrates the pulled-back density
// over the unit-determinant Cholesky chart. Both deterministic quadrature.
double kappa2(const ChannelParams& p, char method, double rel_tol = 1e-9);

// Probability lower bound for {M_2 > delta} under the uniform surface measure;
// equals 1 for delta <= delta_star.
double m2_lower_bound(double delta, const ChannelParams& p, double rel_tol = 1e-9);

// General-d version of the surface-integral lower bound; d = 2 delegates to
// m2_lower_bound, d >= 3 is Monte-Carlo over the Cholesky chart box.
struct Theorem5Result {
    double value = 0.0;
    double error_estimate = 0.0;  // 0 for the deterministic d = 2 path
    bool empty_domain = false;
};
Theorem5Result theorem5_lower_bound(double delta, const ChannelParams& p,
                                    std::uint64_t mc_n = 200000, std::uint64_t seed = 0);

struct SnrTableRow {
    double s = 0.0;
    double delta_s = 0.0;
    double lower_bound = 0.0;
};
// delta_s = 4 d^2 s gamma^d c0^{-1/d}; lower_bound from the surface-measure bound.
std::vector<SnrTableRow> snr_table(const std::vector<double>& s_list, const ChannelParams& p);

namespace detail {
// (c0^{5/4}/(2 sqrt(gamma))) * int_{u_lo}^{u_hi} du a(u) int_{-pi/2}^{pi/2} dphi
//   ||grad g||_2 / (u^2+gamma), the nonsingular reparametrization of the
// surface integral over the d=2 chart; equals kappa_2 on (0, u_max).
double surface_integral_d2(const ChannelParams& p, double u_lo, double u_hi, double rel_tol);
double u_of_a(const ChannelParams& p, double a);
double u_max_d2(const ChannelParams& p);
double theta_of_a(const ChannelParams& p, double a);
}  // namespace detail

}  // namespace latmin
