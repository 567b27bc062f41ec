#include "minar/linalg.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace minar {

Matrix::Matrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0)
        throw std::invalid_argument("Matrix: negative dimension");
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    Matrix m(r, c);
    int i = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != c)
            throw std::invalid_argument("Matrix::from_rows: ragged rows");
        int j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

Matrix Matrix::diagonal(const Vec& d) {
    Matrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

static void check_same_shape(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("matrix shape mismatch");
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    check_same_shape(a, b);
    Matrix r = a;
    for (size_t k = 0; k < r.data().size(); ++k) r.data()[k] += b.data()[k];
    return r;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    check_same_shape(a, b);
    Matrix r = a;
    for (size_t k = 0; k < r.data().size(); ++k) r.data()[k] -= b.data()[k];
    return r;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product shape mismatch");
    Matrix r(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

Vec operator*(const Matrix& a, const Vec& x) {
    if (a.cols() != static_cast<int>(x.size()))
        throw std::invalid_argument("matrix-vector shape mismatch");
    Vec y(a.rows(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    check_same_shape(a, b);
    double m = 0.0;
    for (size_t k = 0; k < a.data().size(); ++k)
        m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
    return m;
}

double max_abs(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

Vec solve(Matrix a, Vec b) {
    const int n = a.rows();
    if (a.cols() != n || static_cast<int>(b.size()) != n)
        throw std::invalid_argument("solve: shape mismatch");
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) < 1e-14)
            throw std::runtime_error("solve: singular system");
        if (piv != col) {
            for (int j = col; j < n; ++j) std::swap(a(col, j), a(piv, j));
            std::swap(b[col], b[piv]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            b[r] -= f * b[col];
        }
    }
    Vec x(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

bool cholesky(const Matrix& a, Matrix& lower) {
    const int n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("cholesky: not square");
    lower = Matrix(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
            if (i == j) {
                if (s <= 0.0 || !std::isfinite(s)) return false;
                lower(i, i) = std::sqrt(s);
            } else {
                lower(i, j) = s / lower(j, j);
            }
        }
    }
    return true;
}

Matrix invert_spd(const Matrix& a, bool& ok) {
    Matrix lower;
    ok = cholesky(a, lower);
    if (!ok) return Matrix();
    const int n = a.rows();
    // Solve L L^T X = I column by column.
    Matrix inv(n, n);
    Vec y(n), x(n);
    for (int col = 0; col < n; ++col) {
        for (int i = 0; i < n; ++i) {
            double s = (i == col) ? 1.0 : 0.0;
            for (int k = 0; k < i; ++k) s -= lower(i, k) * y[k];
            y[i] = s / lower(i, i);
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = y[i];
            for (int k = i + 1; k < n; ++k) s -= lower(k, i) * x[k];
            x[i] = s / lower(i, i);
        }
        for (int i = 0; i < n; ++i) inv(i, col) = x[i];
    }
    return inv;
}

double spectral_radius(const Matrix& a) {
    const int n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("spectral_radius: not square");
    if (n == 0) return 0.0;

    // Power iteration on A + I with the Rayleigh quotient; subtract the shift.
    Vec x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double prev = 0.0;
    const int max_iters = 200000;
    for (int iter = 0; iter < max_iters; ++iter) {
        Vec y = a * x;
        for (int i = 0; i < n; ++i) y[i] += x[i];
        double norm = 0.0;
        for (double v : y) norm += v * v;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        double rq = 0.0;
        for (int i = 0; i < n; ++i) rq += x[i] * y[i];
        for (int i = 0; i < n; ++i) x[i] = y[i] / norm;
        if (iter > 2 && std::abs(rq - prev) < 1e-14 * std::max(1.0, std::abs(rq)))
            return std::max(0.0, rq - 1.0);
        prev = rq;
    }
    return std::max(0.0, prev - 1.0);
}

} // namespace minar
