#ifndef CROSSDIFF_LINALG_HPP
#define CROSSDIFF_LINALG_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "crossdiff/cinterval.hpp"
#include "crossdiff/interval.hpp"

namespace crossdiff {

// Dense row-major matrix over Interval, CInterval, double or complex<double>.
template <class S>
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<S> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

    S& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    const S& operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
};

using IMatrix = Mat<Interval>;
using CIMatrix = Mat<CInterval>;
using IVector = std::vector<Interval>;
using CIVector = std::vector<CInterval>;

// y = M x with componentwise containment of all exact products.
template <class S, class T>
std::vector<decltype(S() * T())> enclose_matvec(const Mat<S>& m, const std::vector<T>& x) {
    if (m.cols != static_cast<int>(x.size())) throw DimensionMismatch("matvec dimension mismatch");
    std::vector<decltype(S() * T())> y(static_cast<size_t>(m.rows));
    for (int i = 0; i < m.rows; ++i) {
        decltype(S() * T()) acc{};
        for (int j = 0; j < m.cols; ++j) acc += m(i, j) * x[j];
        y[static_cast<size_t>(i)] = acc;
    }
    return y;
}

// Interval matrix products with a point-valued left factor, multi-threaded
// over rows. Per-entry summation order is fixed, so results do not depend
// on the thread count.
IMatrix matmul_point_left(const Mat<double>& a, const IMatrix& b);
CIMatrix matmul_point_left(const Mat<std::complex<double>>& a, const CIMatrix& b);

IMatrix matmul(const IMatrix& a, const IMatrix& b);

Mat<double> midpoint(const IMatrix& m);
Mat<std::complex<double>> midpoint(const CIMatrix& m);
IMatrix promote(const Mat<double>& m);
CIMatrix promote(const Mat<std::complex<double>>& m);

int worker_count(); // CROSSDIFF_THREADS env override, else hardware, capped

} // namespace crossdiff

#endif
