#include "crossdiff/model.hpp"

#include "crossdiff/errors.hpp"

namespace crossdiff {

ModelParams ModelParams::from_strings(const std::array<std::string, 9>& s) {
    ModelParams p;
    p.source = s;
    p.r1 = interval_from_decimal(s[0]);
    p.r2 = interval_from_decimal(s[1]);
    p.a1 = interval_from_decimal(s[2]);
    p.a2 = interval_from_decimal(s[3]);
    p.b1 = interval_from_decimal(s[4]);
    p.b2 = interval_from_decimal(s[5]);
    p.d12 = interval_from_decimal(s[6]);
    p.d1 = interval_from_decimal(s[7]);
    p.d2 = interval_from_decimal(s[8]);
    p.validate();
    return p;
}

ModelParams ModelParams::reference_set(const std::string& d) {
    return from_strings({"5", "2", "3", "3", "1", "1", "3", d, d});
}

void ModelParams::validate() const {
    if (!(d1.lo > 0.0)) throw ConfigError("d1 must be positive");
    if (!(d2.lo > 0.0)) throw ConfigError("d2 must be positive");
    if (d12.lo < 0.0) throw ConfigError("d12 must be nonnegative");
    const Interval* nonneg[] = {&r1, &r2, &a1, &a2, &b1, &b2};
    for (const Interval* q : nonneg)
        if (q->lo < 0.0) throw ConfigError("reaction coefficients must be nonnegative");
}

Equilibrium homogeneous_equilibrium(const ModelParams& p) {
    Interval det = p.a1 * p.a2 - p.b1 * p.b2;
    if (det.contains_zero()) throw DomainError("degenerate reaction coefficients");
    return {(p.r1 * p.a2 - p.r2 * p.b1) / det, (p.r2 * p.a1 - p.r1 * p.b2) / det};
}

} // namespace crossdiff
