#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latmin/forms.hpp"
#include "latmin/quadrature.hpp"

namespace latmin {

// Axis-aligned ellipsoid sum (x_i/alpha_i)^2 <= 1, described by its semi-axes.
struct Ellipsoid {
    std::vector<double> semi_axes;

    explicit Ellipsoid(std::vector<double> axes);
    int dim() const { return static_cast<int>(semi_axes.size()); }
    // ascending copy; exact ties perturbed by +1e-12*i to keep the axis
    // reduction well defined (ties form a measure-zero set)
    std::vector<double> sorted_axes() const;
};

struct SphericalMeasure {
    double value = 0.0;
    double error_estimate = 0.0;
    std::string method;  // exact-case | recursion | bounds-midpoint | monte-carlo
    bool converged = true;
};

struct BoundPair {
    double lower = 0.0;
    double upper = 1.0;
    bool lower_defined = true;
    double lower_error = 0.0;
    double upper_error = 0.0;
    std::string lower_label;
    std::string upper_label;
};

double riemann_zeta(double s);           // series + tail, |error| < 1e-15 for s >= 2
double wallis(int k);                    // int_0^{pi/2} sin^k
double ball_volume(int d);               // V_d
double sphere_area(int d);               // A_d = surface of S^{d-1}

// Probability bounds for {lattice minimum <= delta} under the invariant
// measure on unimodular lattices; the d = 2 lower constant is not available,
// so that side is flagged undefined.
BoundPair km_bounds(int d, double delta);

struct HyperplaneSection {
    SymmetricForm q;                 // section in projected coordinates
    std::vector<double> semi_axes;   // in-plane semi-axes, ascending
};
// Section of the ellipsoid by the hyperplane orthogonal to v (pivot = largest
// |v| coordinate). The in-plane semi-axes interlace the input axes.
HyperplaneSection intersect_hyperplane(const Ellipsoid& e, const std::vector<double>& v);

// alpha~_i = sqrt(alpha_i^2 (alpha_d^2-1)/(alpha_d^2-alpha_i^2)); requires
// sorted axes with alpha_d > 1. Clamped variant caps at 1.
std::vector<double> reduced_axes(const Ellipsoid& e);
std::vector<double> reduced_axes_clamped(const Ellipsoid& e);

// Normalized surface measure of the ellipsoid's intersection with the unit
// sphere, by the exact recursion (nested quadrature down to the indicator
// base case).
SphericalMeasure cap_measure_recursive(const Ellipsoid& e, double rel_tol = 1e-8);

// Incomplete-Wallis product I_d (requires max axis >= 1) and its closed-form
// companion L_d with L_d (2/pi)^{d-2} <= I_d <= L_d.
double cap_I(const std::vector<double>& alpha_sorted);
double cap_L(const std::vector<double>& alpha_sorted);
double envelope_a(int d);        // lower product-envelope constant
double envelope_a_prime(int d);  // upper product-envelope constant

struct CapMeasureBounds {
    BoundPair tight;     // from the reduced clamped axes
    BoundPair crude;     // from the raw axes; lower needs alpha_d >= sqrt(d)
    BoundPair envelope;  // product-form envelope constants
};
CapMeasureBounds cap_measure_bounds(const Ellipsoid& e);

// Empirical frequency over Haar rotations of the event that the rotated
// integer lattice meets the ellipsoid nontrivially; exact per-sample decision
// by enumeration.
SphericalMeasure p_ellipsoid_mc(const Ellipsoid& e, std::uint64_t n_samples, std::uint64_t seed);

// All gcd-1 integer vectors of euclidean norm <= radius (both signs kept).
std::vector<std::vector<long long>> primitive_points_in_ball(int d, double radius,
                                                             std::uint64_t cap = 2000000);

// Probability bracket for the event that a random rotation of Z^d meets the
// ellipsoid with axes sqrt(delta) * Delta (Delta positive, det 1). The lower
// bound's hyperplane-integral term is Monte-Carlo and carries its own error;
// the deterministic cap-measure term alone is certified.
struct SpectralEventBounds {
    BoundPair bounds;
    double lower_deterministic = 0.0;  // certified part of the lower bound
    double lower_mc = 0.0;             // hyperplane-integral term
    double lower_mc_error = 0.0;
    std::uint64_t primitive_terms = 0;
};
SpectralEventBounds theorem2_bounds(const std::vector<double>& delta_axes, double delta,
                                    std::uint64_t mc_n = 20000, std::uint64_t seed = 0,
                                    double rel_tol = 1e-6);

// Bounds for the probability of {minimum <= delta} under the log-uniform
// compactly supported spectral measure; exact zero below the support
// threshold delta <= eps^{2(d-1)}.
struct Theorem3Result {
    bool exact_zero = false;
    double lower = 0.0;  // c_d(eps) * s_d
    double upper = 0.0;  // C_d(eps) * S_d
    double s_d = 0.0;
    double s_d_error = 0.0;
    double S_d = 0.0;
    double S_d_error = 0.0;
    double c_d = 0.0;
    double C_d = 0.0;
    double s_d_envelope_lower = 0.0;  // closed-form floor for s_d
    double S_d_envelope_upper = 0.0;  // closed-form ceiling for S_d
};
Theorem3Result theorem3_bounds(int d, double eps, double delta, std::uint64_t mc_n = 200000,
                               std::uint64_t seed = 0);

}  // namespace latmin
