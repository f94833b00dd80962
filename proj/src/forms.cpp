#include "latmin/forms.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace latmin {

SymmetricForm::SymmetricForm(Mat m) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() < 1)
        throw std::invalid_argument("SymmetricForm: matrix must be square and non-empty");
    const double scale = std::max(1e-300, max_abs(mat_));
    for (int i = 0; i < mat_.rows(); ++i)
        for (int j = i + 1; j < mat_.cols(); ++j) {
            if (std::fabs(mat_(i, j) - mat_(j, i)) > 1e-12 * scale)
                throw std::invalid_argument("SymmetricForm: matrix not symmetric at (" + std::to_string(i) +
                                            "," + std::to_string(j) + ")");
            const double avg = 0.5 * (mat_(i, j) + mat_(j, i));
            mat_(i, j) = mat_(j, i) = avg;
        }
    for (int i = 0; i < mat_.rows(); ++i)
        if (!std::isfinite(mat_(i, i))) throw std::invalid_argument("SymmetricForm: non-finite entry");
}

double SymmetricForm::evaluate(const std::vector<double>& x) const {
    double s = 0.0;
    const int d = dim();
    for (int i = 0; i < d; ++i) {
        s += mat_(i, i) * x[i] * x[i];
        for (int j = i + 1; j < d; ++j) s += 2.0 * mat_(i, j) * x[i] * x[j];
    }
    return s;
}

double SymmetricForm::evaluate_int(const std::vector<long long>& x) const {
    std::vector<double> xd(x.begin(), x.end());
    return evaluate(xd);
}

TriangularForm::TriangularForm(Mat m) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() < 1)
        throw std::invalid_argument("TriangularForm: matrix must be square and non-empty");
    for (int i = 0; i < mat_.rows(); ++i) {
        if (!(mat_(i, i) > 0.0))
            throw std::invalid_argument("TriangularForm: nonpositive diagonal at index " + std::to_string(i));
        for (int j = 0; j < i; ++j)
            if (mat_(i, j) != 0.0)
                throw std::invalid_argument("TriangularForm: nonzero entry below diagonal at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
    }
}

double TriangularForm::diag_product() const {
    double p = 1.0;
    for (int i = 0; i < dim(); ++i) p *= mat_(i, i);
    return p;
}

bool TriangularForm::unit_determinant(double rel_tol) const {
    return std::fabs(diag_product() - 1.0) <= rel_tol;
}

SymmetricForm TriangularForm::gram() const { return SymmetricForm(transpose(mat_) * mat_); }

Mat read_matrix(const std::string& text) {
    // JSON form first, falling back to whitespace-separated rows.
    size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        auto j = nlohmann::json::parse(text);
        const int d = j.at("dim").get<int>();
        const auto& rows = j.at("rows");
        if (static_cast<int>(rows.size()) != d) throw std::invalid_argument("matrix JSON: row count != dim");
        Mat m(d, d);
        for (int i = 0; i < d; ++i) {
            if (static_cast<int>(rows[i].size()) != d)
                throw std::invalid_argument("matrix JSON: column count != dim");
            for (int k = 0; k < d; ++k) m(i, k) = rows[i][k].get<double>();
        }
        return m;
    }
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("matrix text: no rows");
    const int d = static_cast<int>(rows.size());
    Mat m(d, static_cast<int>(rows[0].size()));
    for (int i = 0; i < d; ++i) {
        if (rows[i].size() != rows[0].size()) throw std::invalid_argument("matrix text: ragged rows");
        for (size_t k = 0; k < rows[i].size(); ++k) m(i, static_cast<int>(k)) = rows[i][k];
    }
    return m;
}

Mat read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open matrix file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_matrix(buf.str());
}

std::string format_full(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

std::string matrix_to_json(const Mat& m) {
    std::ostringstream os;
    os << "{\"dim\": " << m.rows() << ", \"rows\": [";
    for (int i = 0; i < m.rows(); ++i) {
        os << (i ? ", [" : "[");
        for (int j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << format_full(m(i, j));
        os << "]";
    }
    os << "]}";
    return os.str();
}

std::string matrix_to_text(const Mat& m) {
    std::ostringstream os;
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) os << (j ? " " : "") << format_full(m(i, j));
        os << "\n";
    }
    return os.str();
}

}  // namespace latmin
