#include "crossdiff/lapack.hpp"

#include <lapacke.h>

#include <limits>
#include <string>

#include "crossdiff/errors.hpp"

namespace crossdiff::lapack {

bool invert(Mat<double>& a) {
    if (a.rows != a.cols) throw DimensionMismatch("invert: square matrix required");
    lapack_int n = a.rows;
    std::vector<lapack_int> ipiv(static_cast<size_t>(n));
    lapack_int info = LAPACKE_dgetrf(LAPACK_ROW_MAJOR, n, n, a.a.data(), n, ipiv.data());
    if (info != 0) return false;
    info = LAPACKE_dgetri(LAPACK_ROW_MAJOR, n, a.a.data(), n, ipiv.data());
    return info == 0;
}

bool invert(Mat<std::complex<double>>& a) {
    if (a.rows != a.cols) throw DimensionMismatch("invert: square matrix required");
    lapack_int n = a.rows;
    std::vector<lapack_int> ipiv(static_cast<size_t>(n));
    auto* data = reinterpret_cast<lapack_complex_double*>(a.a.data());
    lapack_int info = LAPACKE_zgetrf(LAPACK_ROW_MAJOR, n, n, data, n, ipiv.data());
    if (info != 0) return false;
    info = LAPACKE_zgetri(LAPACK_ROW_MAJOR, n, data, n, ipiv.data());
    return info == 0;
}

bool solve(Mat<double> a, std::vector<double>& b) {
    if (a.rows != a.cols || a.rows != static_cast<int>(b.size()))
        throw DimensionMismatch("solve: dimensions");
    lapack_int n = a.rows;
    std::vector<lapack_int> ipiv(static_cast<size_t>(n));
    lapack_int info = LAPACKE_dgesv(LAPACK_ROW_MAJOR, n, 1, a.a.data(), n, ipiv.data(), b.data(), 1);
    return info == 0;
}

bool solve(Mat<std::complex<double>> a, std::vector<std::complex<double>>& b) {
    if (a.rows != a.cols || a.rows != static_cast<int>(b.size()))
        throw DimensionMismatch("solve: dimensions");
    lapack_int n = a.rows;
    std::vector<lapack_int> ipiv(static_cast<size_t>(n));
    lapack_int info = LAPACKE_zgesv(LAPACK_ROW_MAJOR, n, 1,
                                    reinterpret_cast<lapack_complex_double*>(a.a.data()), n,
                                    ipiv.data(), reinterpret_cast<lapack_complex_double*>(b.data()), 1);
    return info == 0;
}

double rcond_1(const Mat<double>& a) {
    Mat<double> lu = a;
    lapack_int n = a.rows;
    std::vector<lapack_int> ipiv(static_cast<size_t>(n));
    double anorm = LAPACKE_dlange(LAPACK_ROW_MAJOR, '1', n, n, a.a.data(), n);
    if (LAPACKE_dgetrf(LAPACK_ROW_MAJOR, n, n, lu.a.data(), n, ipiv.data()) != 0) return 0.0;
    double rcond = 0.0;
    if (LAPACKE_dgecon(LAPACK_ROW_MAJOR, '1', n, lu.a.data(), n, anorm, &rcond) != 0) return 0.0;
    return rcond;
}

Eig geev(Mat<double> a) {
    if (a.rows != a.cols) throw DimensionMismatch("geev: square matrix required");
    lapack_int n = a.rows;
    std::vector<double> ar(static_cast<size_t>(n)), ai(static_cast<size_t>(n));
    Mat<double> vr(n, n), vl(n, n);
    lapack_int info = LAPACKE_dgeev(LAPACK_ROW_MAJOR, 'N', 'V', n, a.a.data(), n, ar.data(), ai.data(),
                                    vl.a.data(), n, vr.a.data(), n);
    if (info != 0) throw EigensolverFailure("dgeev failed with info " + std::to_string(info));
    Eig out;
    out.values.resize(static_cast<size_t>(n));
    out.vectors = Mat<std::complex<double>>(n, n);
    for (lapack_int j = 0; j < n; ++j)
        out.values[static_cast<size_t>(j)] = {ar[static_cast<size_t>(j)], ai[static_cast<size_t>(j)]};
    for (lapack_int j = 0; j < n; ++j) {
        if (ai[static_cast<size_t>(j)] > 0.0 && j + 1 < n) {
            for (lapack_int i = 0; i < n; ++i) {
                std::complex<double> z(vr(i, j), vr(i, j + 1));
                out.vectors(i, j) = z;
                out.vectors(i, j + 1) = std::conj(z);
            }
            ++j;
        } else {
            for (lapack_int i = 0; i < n; ++i) out.vectors(i, j) = vr(i, j);
        }
    }
    return out;
}

} // namespace crossdiff::lapack
