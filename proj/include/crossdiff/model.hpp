#ifndef CROSSDIFF_MODEL_HPP
#define CROSSDIFF_MODEL_HPP

#include <array>
#include <string>

#include "crossdiff/interval.hpp"

namespace crossdiff {

// Coefficients of the two-species cross-diffusion system
//   ((d1 + d12 v) u)'' + (r1 - a1 u - b1 v) u = 0
//   d2 v''            + (r2 - b2 u - a2 v) v = 0
// on (0,1) with Neumann boundary conditions. Values are enclosures of the
// decimal strings they were parsed from; the strings are kept for
// serialization.
struct ModelParams {
    Interval r1, r2, a1, a2, b1, b2, d12, d1, d2;
    std::array<std::string, 9> source; // r1,r2,a1,a2,b1,b2,d12,d1,d2

    static ModelParams from_strings(const std::array<std::string, 9>& s);
    // r1=5, r2=2, a1=3, a2=3, b1=1, b2=1, d12=3, d1=d2=d
    static ModelParams reference_set(const std::string& d);

    void validate() const;
};

// Spatially constant coexistence state of the reaction part:
// u = (r1 a2 - r2 b1)/(a1 a2 - b1 b2), v = (r2 a1 - r1 b2)/(a1 a2 - b1 b2).
struct Equilibrium {
    Interval u, v;
};
Equilibrium homogeneous_equilibrium(const ModelParams& p);

} // namespace crossdiff

#endif
