#ifndef CROSSDIFF_LAPACK_HPP
#define CROSSDIFF_LAPACK_HPP

#include <complex>
#include <vector>

#include "crossdiff/linalg.hpp"

namespace crossdiff::lapack {

// In-place inverse; false on singular factorization.
bool invert(Mat<double>& a);
bool invert(Mat<std::complex<double>>& a);

// Solve a x = b in place (b overwritten with x); false on singularity.
bool solve(Mat<double> a, std::vector<double>& b);
bool solve(Mat<std::complex<double>> a, std::vector<std::complex<double>>& b);

// Reciprocal 1-norm condition estimate of a (0 when singular).
double rcond_1(const Mat<double>& a);

// Standard eigenproblem a z = lambda z with right eigenvectors.
struct Eig {
    std::vector<std::complex<double>> values;
    Mat<std::complex<double>> vectors; // column j pairs with values[j]
};
Eig geev(Mat<double> a);

} // namespace crossdiff::lapack

#endif
