#pragma once

#include <cstdint>
#include <functional>

#include "latmin/forms.hpp"
#include "latmin/quadrature.hpp"
#include "latmin/spectral.hpp"  // BoundPair

namespace latmin {

// Probability density on positive definite matrices, supplied as a callable
// plus a support descriptor (full cone vs determinant-one slice).
struct DensityOnForms {
    int dim = 2;
    std::function<double(const SymmetricForm&)> evaluate;
    bool determinant_one = false;
};

// Jacobian of L -> ^T L L on upper triangular matrices: 2^d prod l_ii^{d-i+1}.
double jacobian_cholesky(const TriangularForm& l);

// Jacobian of the constrained chart map on the capacity manifold:
// 2^{d-1} c^{-(d-1)(d+2)/(2d)} prod_{i<d} h_ii^{d-i+1}. Requires
// det(gamma I + ^T H H) = c.
double jacobian_psi(const TriangularForm& h, double gamma, double c);

// Pushforward density of the diagonal under the Cholesky map:
// G_f(beta) = 2^d prod beta_i^{d-i+1} int_{R^p} (f o phi_chol)(beta, u) du.
// d = 2 integrates deterministically via u = tan(v); d >= 3 uses Monte-Carlo
// with a standard Gaussian proposal.
IntegrationResult chol_diag_density(const DensityOnForms& f, const std::vector<double>& beta,
                                    double rel_tol = 1e-7, std::uint64_t mc_n = 20000,
                                    std::uint64_t seed = 0);

// First-pivot marginal g_f(beta_1) = int over the remaining diagonal entries
// of G_f. d = 2 only (single remaining coordinate).
IntegrationResult chol_pivot_density(const DensityOnForms& f, double beta1,
                                     double rel_tol = 1e-7);

// Density-based bracket for P{lattice minimum <= delta}:
// lower = 1 - int_{sqrt(delta)}^inf g_f, upper = 1 - int_{(sqrt(delta),inf)^d} G_f
// (full cone), or the determinant-one variant over
// {beta_i > sqrt(delta), prod beta_i < 1/sqrt(delta)}. d = 2 only.
BoundPair theorem4_bounds(const DensityOnForms& f, double delta, double rel_tol = 1e-6);

struct WishartParams {
    int d = 2;
    int n = 2;
    SymmetricForm v;
};
DensityOnForms wishart_density(const WishartParams& params);

double multivariate_gamma(int d, double a);

// Closed forms for the d = n = 2 identity-scale Wishart specialization:
// J1 = 1 - e^{-delta/2}, J2 = 1 - e^{-delta/2} * sqrt(2/pi) int_{sqrt(delta)}^inf e^{-t^2/2}.
BoundPair wishart_J1_J2(double delta);

}  // namespace latmin
