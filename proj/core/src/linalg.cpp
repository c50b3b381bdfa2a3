#include "mlmc/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace mlmc {

Mat Mat::identity(int n) {
    Mat I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

Vec operator+(const Vec& x, const Vec& y) {
    Vec r(x.size());
    for (size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
    return r;
}

Vec operator-(const Vec& x, const Vec& y) {
    Vec r(x.size());
    for (size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
    return r;
}

Vec operator*(double s, const Vec& x) {
    Vec r(x.size());
    for (size_t i = 0; i < x.size(); ++i) r[i] = s * x[i];
    return r;
}

Mat operator+(const Mat& A, const Mat& B) {
    Mat R(A.rows, A.cols);
    for (size_t i = 0; i < A.a.size(); ++i) R.a[i] = A.a[i] + B.a[i];
    return R;
}

Mat operator*(double s, const Mat& A) {
    Mat R(A.rows, A.cols);
    for (size_t i = 0; i < A.a.size(); ++i) R.a[i] = s * A.a[i];
    return R;
}

Mat matmul(const Mat& A, const Mat& B) {
    if (A.cols != B.rows) throw std::invalid_argument("matmul: dimension mismatch");
    Mat R(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i) {
        for (int k = 0; k < A.cols; ++k) {
            const double aik = A(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < B.cols; ++j) R(i, j) += aik * B(k, j);
        }
    }
    return R;
}

Vec matvec(const Mat& A, const Vec& x) {
    if (A.cols != static_cast<int>(x.size())) throw std::invalid_argument("matvec: dimension mismatch");
    Vec r(A.rows, 0.0);
    for (int i = 0; i < A.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < A.cols; ++j) s += A(i, j) * x[j];
        r[i] = s;
    }
    return r;
}

double dot(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

double operator_norm(const Mat& A) {
    if (A.rows == 1 && A.cols == 1) return std::fabs(A(0, 0));
    // power iteration on A^T A with a fixed deterministic start
    Vec v(A.cols, 1.0);
    for (int j = 0; j < A.cols; ++j) v[j] = 1.0 + 0.01 * j;
    double nv = norm2(v);
    for (auto& c : v) c /= nv;
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
        Vec w = matvec(A, v);
        Vec u(A.cols, 0.0);
        for (int j = 0; j < A.cols; ++j) {
            double s = 0.0;
            for (int i = 0; i < A.rows; ++i) s += A(i, j) * w[i];
            u[j] = s;
        }
        double nu = norm2(u);
        if (nu == 0.0) return 0.0;
        double next = nu;
        for (size_t j = 0; j < u.size(); ++j) v[j] = u[j] / nu;
        if (it > 8 && std::fabs(next - lambda) <= 1e-14 * next) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::sqrt(lambda);
}

void lu_solve(Mat A, Mat& B) {
    if (A.rows != A.cols || A.rows != B.rows) throw std::invalid_argument("lu_solve: dimension mismatch");
    const int n = A.rows;
    std::vector<int> piv(n);
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::fabs(A(k, k));
        for (int i = k + 1; i < n; ++i) {
            if (std::fabs(A(i, k)) > best) {
                best = std::fabs(A(i, k));
                p = i;
            }
        }
        if (best == 0.0) throw std::domain_error("lu_solve: singular matrix");
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
            for (int j = 0; j < B.cols; ++j) std::swap(B(k, j), B(p, j));
        }
        for (int i = k + 1; i < n; ++i) {
            const double l = A(i, k) / A(k, k);
            A(i, k) = l;
            for (int j = k + 1; j < n; ++j) A(i, j) -= l * A(k, j);
            for (int j = 0; j < B.cols; ++j) B(i, j) -= l * B(k, j);
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        for (int j = 0; j < B.cols; ++j) {
            double s = B(k, j);
            for (int i = k + 1; i < n; ++i) s -= A(k, i) * B(i, j);
            B(k, j) = s / A(k, k);
        }
    }
}

Mat expm(const Mat& A) {
    if (A.rows != A.cols) throw std::invalid_argument("expm: square matrix required");
    const int n = A.rows;
    double norm1 = 0.0;
    for (int j = 0; j < n; ++j) {
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += std::fabs(A(i, j));
        norm1 = std::max(norm1, c);
    }
    // Pade(13) with scaling so that ||A/2^s||_1 <= theta_13
    const double theta13 = 5.371920351148152;
    int s = 0;
    if (norm1 > theta13) s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    Mat As = (1.0 / std::pow(2.0, s)) * A;

    static const double b[14] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
    Mat I = Mat::identity(n);
    Mat A2 = matmul(As, As);
    Mat A4 = matmul(A2, A2);
    Mat A6 = matmul(A2, A4);

    Mat U_inner = b[13] * A6 + b[11] * A4 + b[9] * A2;
    Mat U = matmul(A6, U_inner) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I;
    U = matmul(As, U);
    Mat V_inner = b[12] * A6 + b[10] * A4 + b[8] * A2;
    Mat V = matmul(A6, V_inner) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;

    Mat P = U + V;                      // V + U
    Mat Q = V + (-1.0) * U;             // V - U
    lu_solve(Q, P);                     // P <- Q^{-1} P
    for (int k = 0; k < s; ++k) P = matmul(P, P);
    return P;
}

std::pair<Mat, Mat> expm_with_integral(const Mat& A, double h) {
    const int d = A.rows;
    Mat blk(2 * d, 2 * d, 0.0);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) blk(i, j) = h * A(i, j);
        blk(i, d + i) = h;
    }
    const Mat E = expm(blk);
    Mat M1(d, d), M2(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            M1(i, j) = E(i, j);
            M2(i, j) = E(i, d + j);
        }
    return {M1, M2};
}

std::pair<Mat, Mat> matrix_power_with_geom_sum(const Mat& M, std::uint64_t n) {
    const int d = M.rows;
    Mat pow_acc = Mat::identity(d);  // M^n accumulated
    Mat sum_acc(d, d, 0.0);          // sum_{j<n} M^j accumulated
    Mat base = M;
    Mat base_sum = Mat::identity(d);  // sum over one element of the current block
    std::uint64_t bit = n;
    while (bit > 0) {
        if (bit & 1u) {
            sum_acc = sum_acc + matmul(pow_acc, base_sum);
            pow_acc = matmul(pow_acc, base);
        }
        base_sum = base_sum + matmul(base, base_sum);
        base = matmul(base, base);
        bit >>= 1;
    }
    return {pow_acc, sum_acc};
}

Mat cholesky(const Mat& S) {
    if (S.rows != S.cols) throw std::invalid_argument("cholesky: square matrix required");
    const int n = S.rows;
    Mat L(n, n);
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::fabs(S(i, i)));
    for (int j = 0; j < n; ++j) {
        double d = S(j, j);
        for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (d < -1e-10 * std::max(scale, 1.0)) throw std::domain_error("cholesky: matrix not PSD");
        L(j, j) = std::sqrt(std::max(d, 0.0));
        for (int i = j + 1; i < n; ++i) {
            double s = S(i, j);
            for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = (L(j, j) > 0.0) ? s / L(j, j) : 0.0;
        }
    }
    return L;
}

}  // namespace mlmc
