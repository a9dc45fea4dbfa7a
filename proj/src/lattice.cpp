#include "mec/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mec {

GlbResult glb(const ProbVec& p_in, const ProbVec& q_in, const Tolerances& tol) {
    const std::size_t n = std::max(p_in.size(), q_in.size());
    const ProbVec p = pad_to(p_in, n);
    const ProbVec q = pad_to(q_in, n);

    GlbResult r{ProbVec::from_sorted({1.0}), {}, {}, {}, {}};
    r.prefix_p.resize(n);
    r.prefix_q.resize(n);
    r.suffix_p.assign(n + 1, 0.0);
    r.suffix_q.assign(n + 1, 0.0);

    double sp = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sp += p[i];
        sq += q[i];
        r.prefix_p[i] = sp;
        r.prefix_q[i] = sq;
    }
    for (std::size_t i = n; i-- > 0;) {
        r.suffix_p[i] = r.suffix_p[i + 1] + p[i];
        r.suffix_q[i] = r.suffix_q[i + 1] + q[i];
    }

    std::vector<double> z(n);
    double below = 0.0; // max of the two suffix sums at i + 1
    for (std::size_t i = n; i-- > 0;) {
        const double here = std::max(r.suffix_p[i], r.suffix_q[i]);
        double zi = here - below;
        if (zi < tol.eps_zero)
            zi = std::max(zi, 0.0);
        z[i] = zi;
        below = here;
    }
    // Where z coincides with an input component up to rounding, take the
    // input value verbatim; downstream splits compare these exactly.
    for (std::size_t i = 0; i < n; ++i) {
        const double dp = std::abs(z[i] - p[i]);
        const double dq = std::abs(z[i] - q[i]);
        const double snap = 8.0 * std::numeric_limits<double>::epsilon();
        if (std::min(dp, dq) <= snap)
            z[i] = dp <= dq ? p[i] : q[i];
    }
    // Non-increasing by concavity of the prefix-min; rounding can still
    // leave an ulp-sized inversion.
    for (std::size_t i = 1; i < n; ++i)
        if (z[i] > z[i - 1])
            z[i] = z[i - 1];

    r.z = ProbVec::from_sorted(std::move(z), tol);
    return r;
}

ProbVec glb_all(std::span<const ProbVec> ps, const Tolerances& tol) {
    if (ps.empty())
        throw Error(ErrorCode::Empty, "glb of an empty list");
    ProbVec acc = ps.front();
    for (std::size_t i = 1; i < ps.size(); ++i)
        acc = glb(acc, ps[i], tol).z;
    return acc;
}

ProbVec half(const ProbVec& p) {
    std::vector<double> out;
    out.reserve(2 * p.size());
    for (double v : p.values()) {
        out.push_back(0.5 * v);
        out.push_back(0.5 * v);
    }
    return ProbVec::from_sorted(std::move(out));
}

ProbVec half_pow(const ProbVec& p, unsigned i) {
    ProbVec out = p;
    for (unsigned k = 0; k < i; ++k)
        out = half(out);
    return out;
}

} // namespace mec
