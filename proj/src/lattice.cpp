#include "latmin/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace latmin {

TriangularForm cholesky(const SymmetricForm& q) {
    const int d = q.dim();
    double max_diag = 0.0;
    for (int i = 0; i < d; ++i) max_diag = std::max(max_diag, std::fabs(q(i, i)));
    const double pivot_tol = 1e-13 * std::max(max_diag, 1e-300);

    Mat l(d, d);
    for (int i = 0; i < d; ++i) {
        double s = q(i, i);
        for (int k = 0; k < i; ++k) s -= l(k, i) * l(k, i);
        if (s <= pivot_tol)
            throw std::invalid_argument("cholesky: not positive definite, leading minor " +
                                        std::to_string(i + 1) + " fails (pivot " + std::to_string(s) + ")");
        l(i, i) = std::sqrt(s);
        for (int j = i + 1; j < d; ++j) {
            double t = q(i, j);
            for (int k = 0; k < i; ++k) t -= l(k, i) * l(k, j);
            l(i, j) = t / l(i, i);
        }
    }
    return TriangularForm(std::move(l));
}

double determinant(const SymmetricForm& q) {
    const TriangularForm l = cholesky(q);
    const double p = l.diag_product();
    return p * p;
}

double hermite_upper_bound(const SymmetricForm& q) {
    const int d = q.dim();
    return std::pow(4.0 / 3.0, 0.5 * (d - 1)) * std::pow(determinant(q), 1.0 / d);
}

namespace {

// Canonical representative of {x, -x}: the lexicographically smaller one.
std::vector<long long> canonical_sign(std::vector<long long> x) {
    std::vector<long long> neg(x.size());
    for (size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
    return std::lexicographical_compare(neg.begin(), neg.end(), x.begin(), x.end()) ? neg : x;
}

}  // namespace

namespace {

// Enumeration core over a fixed triangular factor; initial_best must be a
// valid upper bound on the minimum (attained or exceeded by some nonzero x).
LatticeMinimumResult enumerate_minimum(const TriangularForm& lt, double initial_best) {
    const int d = lt.dim();
    const Mat& l = lt.mat();

    // mu(i,j) = l_ij / l_ii for j > i; level weights w_i = l_ii^2.
    std::vector<double> w(d);
    Mat mu(d, d);
    for (int i = 0; i < d; ++i) {
        w[i] = l(i, i) * l(i, i);
        for (int j = i + 1; j < d; ++j) mu(i, j) = l(i, j) / l(i, i);
    }

    double best = initial_best;
    std::vector<long long> best_wit;

    std::vector<long long> x(d, 0);
    std::uint64_t nodes = 0;

    // Depth-first from coordinate d-1 down to 0; interval per level from the
    // Fincke-Pohst recurrence. partial = contribution of levels > i.
    std::function<void(int, double)> descend = [&](int level, double partial) {
        const double radius = best * (1.0 + 1e-12) + 1e-300;
        if (partial > radius) return;
        if (level < 0) {
            bool zero = std::all_of(x.begin(), x.end(), [](long long v) { return v == 0; });
            if (zero) return;
            const double value = partial;
            if (value < best * (1.0 - 1e-12) || best_wit.empty()) {
                best = std::min(best, value);
                best_wit = canonical_sign(x);
            } else if (value <= best * (1.0 + 1e-12)) {
                auto c = canonical_sign(x);
                if (std::lexicographical_compare(c.begin(), c.end(), best_wit.begin(), best_wit.end()))
                    best_wit = std::move(c);
                best = std::min(best, value);
            }
            return;
        }
        double center = 0.0;
        for (int j = level + 1; j < d; ++j) center -= mu(level, j) * static_cast<double>(x[j]);
        // Schnorr-Euchner order: nearest-to-center first, re-checking the
        // (possibly shrunken) radius each step so a bad initial bound cannot
        // blow up the range.
        long long up = static_cast<long long>(std::llround(center));
        long long down = up - 1;
        bool up_alive = true, down_alive = true;
        while (up_alive || down_alive) {
            const double tu = static_cast<double>(up) - center;
            const double td = static_cast<double>(down) - center;
            const bool take_up =
                up_alive && (!down_alive || std::fabs(tu) <= std::fabs(td));
            const long long v = take_up ? up : down;
            const double t = take_up ? tu : td;
            const double contrib = w[level] * t * t;
            const double cur_radius = best * (1.0 + 1e-12) + 1e-300;
            if (partial + contrib > cur_radius) {
                if (take_up) up_alive = false; else down_alive = false;
                continue;
            }
            ++nodes;
            x[level] = v;
            descend(level - 1, partial + contrib);
            if (take_up) ++up; else --down;
        }
        x[level] = 0;
    };
    descend(d - 1, 0.0);

    LatticeMinimumResult res;
    res.argmin = best_wit;
    res.nodes_visited = nodes;
    return res;
}

}  // namespace

LatticeMinimumResult lattice_minimum(const SymmetricForm& q) {
    double diag_min = q(0, 0);
    for (int i = 1; i < q.dim(); ++i) diag_min = std::min(diag_min, q(i, i));
    LatticeMinimumResult res = enumerate_minimum(cholesky(q), diag_min);
    res.value = q.evaluate_int(res.argmin);
    return res;
}

LatticeMinimumResult lattice_minimum(const TriangularForm& l) {
    const int d = l.dim();
    // diagonal of ^T L L: sum of squares of column entries
    double diag_min = 0.0;
    for (int i = 0; i < d; ++i) {
        double s = 0.0;
        for (int k = 0; k <= i; ++k) s += l(k, i) * l(k, i);
        diag_min = (i == 0) ? s : std::min(diag_min, s);
    }
    LatticeMinimumResult res = enumerate_minimum(l, diag_min);
    // exact recomputation: value = ||L x||^2
    double value = 0.0;
    for (int i = 0; i < d; ++i) {
        double s = 0.0;
        for (int j = i; j < d; ++j) s += l(i, j) * static_cast<double>(res.argmin[j]);
        value += s * s;
    }
    res.value = value;
    return res;
}

SpectralDecomposition spectral_decompose(const SymmetricForm& q) {
    const int d = q.dim();
    Mat a = q.mat();
    Mat v = Mat::identity(d);

    auto off_mass = [&]() {
        double s = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) s += 2.0 * a(i, j) * a(i, j);
        return s;
    };
    auto diag_mass = [&]() {
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += a(i, i) * a(i, i);
        return s;
    };

    // threshold on squared mass: 1e-28 keeps the off-diagonal Frobenius norm
    // near 1e-14 of the matrix norm
    for (int sweep = 0; sweep < 100 && off_mass() >= 1e-28 * std::max(diag_mass(), 1e-300); ++sweep) {
        for (int p = 0; p < d; ++p)
            for (int r = p + 1; r < d; ++r) {
                if (a(p, r) == 0.0) continue;
                const double theta = 0.5 * (a(r, r) - a(p, p)) / a(p, r);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < d; ++k) {
                    const double akp = a(k, p), akr = a(k, r);
                    a(k, p) = c * akp - s * akr;
                    a(k, r) = s * akp + c * akr;
                }
                for (int k = 0; k < d; ++k) {
                    const double apk = a(p, k), ark = a(r, k);
                    a(p, k) = c * apk - s * ark;
                    a(r, k) = s * apk + c * ark;
                }
                for (int k = 0; k < d; ++k) {
                    const double vkp = v(k, p), vkr = v(k, r);
                    v(k, p) = c * vkp - s * vkr;
                    v(k, r) = s * vkp + c * vkr;
                }
            }
    }

    std::vector<int> order(d);
    for (int i = 0; i < d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

    SpectralDecomposition dec;
    dec.eigenvalues.resize(d);
    dec.p = Mat(d, d);
    // Q = V diag V^T, so P = V^T: row i of P is the eigenvector for eigenvalue i.
    for (int i = 0; i < d; ++i) {
        dec.eigenvalues[i] = a(order[i], order[i]);
        for (int k = 0; k < d; ++k) dec.p(i, k) = v(k, order[i]);
    }
    return dec;
}

}  // namespace latmin
