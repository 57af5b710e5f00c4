// boxdet/numerics.hpp
//
// Complex vector/matrix arithmetic and the square QR factorization shared by
// all detectors. Deliberately minimal: no rectangular shapes, no pivoting.

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace boxdet {

using Cx = std::complex<double>;
using CVector = std::vector<Cx>;

// Row-major dense complex matrix.
struct CMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Cx> data;

    CMatrix() = default;
    CMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

    Cx& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    const Cx& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    static CMatrix identity(std::size_t n);
};

// H = Q * R with unitary Q and upper-triangular R. The diagonal of R is
// real and non-negative, and entries below the diagonal are exact zeros.
struct QrFactors {
    CMatrix q;
    CMatrix r;
};

// Diagonal entries of R below this magnitude are treated as a singular
// channel draw.
inline constexpr double kSingularDiagonal = 1e-12;

// Householder QR of a square matrix. Deterministic for identical input.
// Throws SingularChannel if any |r(i,i)| < kSingularDiagonal.
QrFactors qr_decompose(const CMatrix& h);

// Conjugate-transpose product a^H * v. Throws std::invalid_argument on a
// dimension mismatch.
CVector herm_mul_vec(const CMatrix& a, const CVector& v);

// a^H * b (used by the LMMSE filter normal equations).
CMatrix herm_mul_mat(const CMatrix& a, const CMatrix& b);

// Plain product a * v.
CVector mat_vec(const CMatrix& a, const CVector& v);

// Solves r * z = x for upper-triangular r by back substitution.
// Throws SingularChannel if any |r(i,i)| < kSingularDiagonal.
CVector back_substitute(const CMatrix& r, const CVector& x);

}  // namespace boxdet
