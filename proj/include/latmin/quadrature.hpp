#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace latmin {

struct IntegrationResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::uint64_t evaluations = 0;
    bool converged = false;
};

// Adaptive Gauss-Kronrod 7-15 on (a,b); b may be +infinity, handled by the
// substitution t = a + u/(1-u). Convergence is relative, switching to
// absolute when |value| < 1e-8.
IntegrationResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                               double rel_tol, int max_intervals = 4000);

// Integral of f(b)/sqrt(theta^2 - b^2) over (-theta, theta), via b = theta sin(phi):
// equals the integral of f(theta sin phi) over (-pi/2, pi/2).
IntegrationResult integrate_arcsine(const std::function<double(double)>& f, double theta,
                                    double rel_tol, int max_intervals = 4000);

struct McSample {
    std::vector<double> x;
    double weight = 1.0;  // 1 for probability samplers, 1/density for Lebesgue integrals
};

// Importance-weighted Monte-Carlo mean of weight*f(x) with standard-error
// estimate; deterministic given the sampler's seed.
IntegrationResult integrate_mc(const std::function<double(const std::vector<double>&)>& f,
                               const std::function<McSample()>& sampler, std::uint64_t n);

}  // namespace latmin
