#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace mlmc {

using Vec = std::vector<double>;

// Dense row-major matrix, sized for desk-scale dimensions (d <= 32).
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

    static Mat identity(int n);

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

Vec operator+(const Vec& x, const Vec& y);
Vec operator-(const Vec& x, const Vec& y);
Vec operator*(double s, const Vec& x);

Mat operator+(const Mat& A, const Mat& B);
Mat operator*(double s, const Mat& A);
Mat matmul(const Mat& A, const Mat& B);
Vec matvec(const Mat& A, const Vec& x);

double dot(const Vec& x, const Vec& y);
double norm2(const Vec& x);

// Largest singular value (power iteration on A^T A).
double operator_norm(const Mat& A);

// Solves A X = B; B is overwritten with the solution. Partial pivoting.
void lu_solve(Mat A, Mat& B);

// Matrix exponential, scaling-and-squaring with Pade(13).
Mat expm(const Mat& A);

// Lower-triangular Cholesky factor of a symmetric PSD matrix. Small negative
// pivots (round-off) are clamped to zero; genuinely indefinite input throws.
Mat cholesky(const Mat& S);

// e^{Ah} together with int_0^h e^{As} ds, via one block matrix exponential.
std::pair<Mat, Mat> expm_with_integral(const Mat& A, double h);

// M^n and sum_{j=0}^{n-1} M^j by binary powering (n >= 0).
std::pair<Mat, Mat> matrix_power_with_geom_sum(const Mat& M, std::uint64_t n);

}  // namespace mlmc
