#ifndef MINAR_LINALG_HPP
#define MINAR_LINALG_HPP

#include <initializer_list>
#include <span>
#include <vector>

namespace minar {

using Vec = std::vector<double>;

// Small dense row-major matrix. Dimensions in this library are tiny
// (the number of monitored series), so no effort is spent on blocking.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0);

    static Matrix identity(int n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix diagonal(const Vec& d);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    std::span<const double> row(int r) const {
        return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)};
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Matrix transposed() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Vec operator*(const Matrix& a, const Vec& x);

double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs(const Vec& v);

// Gaussian elimination with partial pivoting. Throws std::runtime_error on
// a numerically singular system.
Vec solve(Matrix a, Vec b);

// Cholesky factorization a = L L^T. Returns false when a is not positive
// definite; on success writes the lower factor.
bool cholesky(const Matrix& a, Matrix& lower);

// Inverse of a symmetric positive definite matrix via Cholesky.
// Sets ok=false (and returns an empty matrix) when the input is not SPD.
Matrix invert_spd(const Matrix& a, bool& ok);

// Modulus of the dominant eigenvalue of a square non-negative matrix.
// Power iteration applied to A + I; the unit shift makes every state
// aperiodic so the iteration converges for thinning-probability matrices.
double spectral_radius(const Matrix& a);

} // namespace minar

#endif
