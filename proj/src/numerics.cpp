#include "boxdet/numerics.hpp"

#include <cmath>
#include <stdexcept>

#include "boxdet/errors.hpp"

namespace boxdet {

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Cx(1.0, 0.0);
    return m;
}

QrFactors qr_decompose(const CMatrix& h) {
    if (h.rows != h.cols) throw std::invalid_argument("qr_decompose: matrix must be square");
    const std::size_t n = h.rows;

    CMatrix r = h;
    CMatrix q = CMatrix::identity(n);

    // Householder reflectors stored column by column; each is applied to the
    // trailing block of R and accumulated into Q afterwards.
    std::vector<CVector> reflectors;
    reflectors.reserve(n);

    for (std::size_t k = 0; k < n; ++k) {
        double norm2 = 0.0;
        for (std::size_t i = k; i < n; ++i) norm2 += std::norm(r(i, k));
        const double alpha_mag = std::sqrt(norm2);

        CVector v(n - k, Cx(0.0, 0.0));
        if (alpha_mag > 0.0) {
            const Cx x0 = r(k, k);
            const double x0_mag = std::abs(x0);
            // alpha = -exp(i*arg(x0)) * |x|, so v = x - alpha*e1 never cancels.
            const Cx phase = (x0_mag > 0.0) ? x0 / x0_mag : Cx(1.0, 0.0);
            const Cx alpha = -phase * alpha_mag;

            for (std::size_t i = k; i < n; ++i) v[i - k] = r(i, k);
            v[0] -= alpha;

            double v_norm2 = 0.0;
            for (const Cx& c : v) v_norm2 += std::norm(c);
            if (v_norm2 > 0.0) {
                const double beta = 2.0 / v_norm2;
                // R <- (I - beta v v^H) R on the trailing columns.
                for (std::size_t j = k; j < n; ++j) {
                    Cx dot(0.0, 0.0);
                    for (std::size_t i = k; i < n; ++i) dot += std::conj(v[i - k]) * r(i, j);
                    dot *= beta;
                    for (std::size_t i = k; i < n; ++i) r(i, j) -= v[i - k] * dot;
                }
            } else {
                v.assign(n - k, Cx(0.0, 0.0));
            }
        }
        reflectors.push_back(std::move(v));
    }

    // Q = H_1 H_2 ... H_n applied to the identity, last reflector first.
    for (std::size_t kk = n; kk-- > 0;) {
        const CVector& v = reflectors[kk];
        double v_norm2 = 0.0;
        for (const Cx& c : v) v_norm2 += std::norm(c);
        if (v_norm2 == 0.0) continue;
        const double beta = 2.0 / v_norm2;
        for (std::size_t j = 0; j < n; ++j) {
            Cx dot(0.0, 0.0);
            for (std::size_t i = kk; i < n; ++i) dot += std::conj(v[i - kk]) * q(i, j);
            dot *= beta;
            for (std::size_t i = kk; i < n; ++i) q(i, j) -= v[i - kk] * dot;
        }
    }

    // Rotate each row of R so the diagonal becomes real non-negative, and
    // absorb the opposite rotation into the columns of Q.
    for (std::size_t i = 0; i < n; ++i) {
        const Cx d = r(i, i);
        const double mag = std::abs(d);
        if (mag > 0.0) {
            const Cx phase = d / mag;
            const Cx conj_phase = std::conj(phase);
            for (std::size_t j = i; j < n; ++j) r(i, j) *= conj_phase;
            for (std::size_t row = 0; row < n; ++row) q(row, i) *= phase;
        }
        r(i, i) = Cx(mag, 0.0);
        for (std::size_t j = 0; j < i; ++j) r(i, j) = Cx(0.0, 0.0);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(r(i, i)) < kSingularDiagonal)
            throw SingularChannel("qr_decompose: diagonal entry below 1e-12");
    }

    return QrFactors{std::move(q), std::move(r)};
}

CVector herm_mul_vec(const CMatrix& a, const CVector& v) {
    if (a.rows != v.size()) throw std::invalid_argument("herm_mul_vec: dimension mismatch");
    CVector out(a.cols, Cx(0.0, 0.0));
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) out[j] += std::conj(a(i, j)) * v[i];
    return out;
}

CMatrix herm_mul_mat(const CMatrix& a, const CMatrix& b) {
    if (a.rows != b.rows) throw std::invalid_argument("herm_mul_mat: dimension mismatch");
    CMatrix out(a.cols, b.cols);
    for (std::size_t i = 0; i < a.cols; ++i)
        for (std::size_t j = 0; j < b.cols; ++j) {
            Cx sum(0.0, 0.0);
            for (std::size_t k = 0; k < a.rows; ++k) sum += std::conj(a(k, i)) * b(k, j);
            out(i, j) = sum;
        }
    return out;
}

CVector mat_vec(const CMatrix& a, const CVector& v) {
    if (a.cols != v.size()) throw std::invalid_argument("mat_vec: dimension mismatch");
    CVector out(a.rows, Cx(0.0, 0.0));
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) out[i] += a(i, j) * v[j];
    return out;
}

CVector back_substitute(const CMatrix& r, const CVector& x) {
    if (r.rows != r.cols || r.rows != x.size())
        throw std::invalid_argument("back_substitute: dimension mismatch");
    const std::size_t n = r.rows;
    CVector z(n, Cx(0.0, 0.0));
    for (std::size_t ii = n; ii-- > 0;) {
        if (std::abs(r(ii, ii)) < kSingularDiagonal)
            throw SingularChannel("back_substitute: diagonal entry below 1e-12");
        Cx acc = x[ii];
        for (std::size_t j = ii + 1; j < n; ++j) acc -= r(ii, j) * z[j];
        z[ii] = acc / r(ii, ii);
    }
    return z;
}

}  // namespace boxdet
