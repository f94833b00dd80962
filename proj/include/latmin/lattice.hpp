#pragma once

#include <cstdint>
#include <vector>

#include "latmin/forms.hpp"

namespace latmin {

struct LatticeMinimumResult {
    double value = 0.0;                 // min over Z^d \ {0} of x^T Q x
    std::vector<long long> argmin;      // lexicographically smallest witness
    std::uint64_t nodes_visited = 0;
};

// Exact minimum of a positive definite quadratic form over nonzero integer
// vectors, by Cholesky-based branch-and-bound enumeration (Fincke-Pohst).
LatticeMinimumResult lattice_minimum(const SymmetricForm& q);

// Same, starting from an already-factored form Q = ^T L L; avoids the
// refactorization (useful when Q is ill conditioned but L is exact).
LatticeMinimumResult lattice_minimum(const TriangularForm& l);

// Unique upper triangular L with positive diagonal and ^T L L = Q.
// Throws naming the failing pivot when Q is not positive definite
// (pivot threshold 1e-13 x largest diagonal entry).
TriangularForm cholesky(const SymmetricForm& q);

struct SpectralDecomposition {
    Mat p;                             // orthogonal, ^T P diag(eigenvalues) P = Q
    std::vector<double> eigenvalues;   // ascending, all positive for SPD input
};

// Cyclic Jacobi; converges when off-diagonal Frobenius mass < 1e-14 x diagonal mass.
SpectralDecomposition spectral_decompose(const SymmetricForm& q);

double determinant(const SymmetricForm& q);

// (4/3)^((d-1)/2) det(Q)^(1/d)
double hermite_upper_bound(const SymmetricForm& q);

}  // namespace latmin
