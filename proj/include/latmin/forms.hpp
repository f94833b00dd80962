#pragma once

#include <string>
#include <vector>

#include "latmin/mat.hpp"

namespace latmin {

// Symmetric matrix meant to be positive definite. Symmetry is checked at
// construction (1e-12 relative); definiteness is checked where it is needed
// (Cholesky) so that failures can name the offending pivot.
class SymmetricForm {
public:
    explicit SymmetricForm(Mat m);

    int dim() const { return mat_.rows(); }
    const Mat& mat() const { return mat_; }
    double operator()(int i, int j) const { return mat_(i, j); }

    // x^T Q x for integer or real coordinates.
    double evaluate(const std::vector<double>& x) const;
    double evaluate_int(const std::vector<long long>& x) const;

private:
    Mat mat_;
};

// Upper triangular matrix with strictly positive diagonal.
class TriangularForm {
public:
    explicit TriangularForm(Mat m);

    int dim() const { return mat_.rows(); }
    const Mat& mat() const { return mat_; }
    double operator()(int i, int j) const { return mat_(i, j); }

    double diag_product() const;
    bool unit_determinant(double rel_tol = 1e-12) const;

    // ^T L L
    SymmetricForm gram() const;

private:
    Mat mat_;
};

// Shared repo-wide matrix format: JSON {"dim": d, "rows": [[...], ...]} or
// whitespace-separated text rows. Writers emit 17 significant digits.
Mat read_matrix(const std::string& text);
Mat read_matrix_file(const std::string& path);
std::string matrix_to_json(const Mat& m);
std::string matrix_to_text(const Mat& m);

std::string format_full(double x);  // 17 significant digits

}  // namespace latmin
