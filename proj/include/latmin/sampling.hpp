#pragma once

#include <cstdint>
#include <vector>

#include "latmin/forms.hpp"
#include "latmin/integer_forcing.hpp"
#include "latmin/rng.hpp"

namespace latmin {

// Haar-distributed orthogonal matrix: Gaussian matrix, QR, columns of the
// orthogonal factor sign-corrected by the diagonal of R. With full_group
// (default) a random reflection covers both components of O_d; without it the
// result is forced into SO_d.
Mat haar_orthogonal(int d, Rng& rng, bool full_group = true);

// ^T X X with the n rows of X i.i.d. N_d(0, V). Requires n >= d.
SymmetricForm wishart_sample(const SymmetricForm& v, int n, Rng& rng);

struct NuEpsilonParams {
    int d = 2;
    double epsilon = 0.5;  // in (0,1)
};

// Draws log alpha'_i uniform on [log eps, -log eps] for i = 1..d-1 and
// completes with alpha_d = 1/(alpha'_1...alpha'_{d-1}); product is 1.
std::vector<double> nu_epsilon_sample(const NuEpsilonParams& params, Rng& rng);

// Importance sampler for the uniform surface measure on the d = 2 capacity
// manifold. Draws are parametrized by (u, phi) on a rectangle with u drawn
// through a power map that spreads samples across scales, which keeps all
// weights finite and the weight distribution well behaved (the raw (a, b)
// chart has inverse-square-root weight singularities at the chart boundary);
// the attached weight satisfies E[weight] = kappa_2, so weighted averages
// over f(H) estimate kappa_2 * E_surface[f].
class ManifoldSampler2 {
public:
    struct Draw {
        double a = 0.0, b = 0.0;  // unit-determinant Cholesky chart coordinates
        TriangularForm h;         // point on the manifold
        TriangularForm l;         // [[a, b], [0, 1/a]]
        double weight = 0.0;
    };

    ManifoldSampler2(const ChannelParams& params, std::uint64_t seed, std::uint64_t stream = 0);

    Draw draw();

    std::uint64_t rejections() const { return rejections_; }

private:
    ChannelParams params_;
    Rng rng_;
    double u_max_;
    double power_ = 1.0;
    std::uint64_t rejections_ = 0;
};

}  // namespace latmin
