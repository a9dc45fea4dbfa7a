#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mec/prob_vec.hpp"

namespace mec {

/// Greatest lower bound z = p ∧ q in the majorization lattice, with the
/// prefix and suffix sums of both inputs (all of common length n).
struct GlbResult {
    ProbVec z;
    std::vector<double> prefix_p; // prefix_p[i] = p[0] + ... + p[i]
    std::vector<double> prefix_q;
    std::vector<double> suffix_p; // suffix_p[i] = p[i] + ... + p[n-1]; length n + 1
    std::vector<double> suffix_q;
};

/// p ∧ q. Inputs of different length are zero-padded to the longer one.
///
/// The prefix sums of z are min(prefix_p, prefix_q). Components are
/// evaluated through the equivalent suffix form
///   z_i = max(suffix_p[i], suffix_q[i]) - max(suffix_p[i+1], suffix_q[i+1])
/// so that the small tail components (the ones the coupling kernel consumes
/// first) carry no cancellation error from the leading mass.
GlbResult glb(const ProbVec& p, const ProbVec& q, const Tolerances& tol = {});

/// Left fold of glb over a non-empty list.
ProbVec glb_all(std::span<const ProbVec> ps, const Tolerances& tol = {});

/// (p1/2, p1/2, ..., pn/2, pn/2).
ProbVec half(const ProbVec& p);

/// half applied i times; i = 0 returns p unchanged.
ProbVec half_pow(const ProbVec& p, unsigned i);

} // namespace mec
