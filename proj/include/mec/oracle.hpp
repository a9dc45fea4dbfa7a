#pragma once

#include <cstddef>
#include <vector>

#include "mec/coupling_k.hpp"
#include "mec/prob_vec.hpp"

namespace mec {

/// A coupling produced by the vertex search, in sorted coordinates
/// (rows follow p's sorted order, columns q's).
struct VertexCoupling {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> m; // row-major
    std::size_t support_size = 0;

    double at(std::size_t i, std::size_t j) const { return m[i * cols + j]; }
    double entropy() const { return mec::entropy(m); }
};

inline constexpr std::size_t kDefaultOracleCap = 10;

/// Every vertex of the transportation polytope of (p, q), possibly with a few
/// non-vertex couplings, deduplicated on 12-decimal rounding and returned in
/// a deterministic order.
///
/// Vertices have forest supports, and a forest always has a leaf row or
/// column carrying min(residual row, residual column) in its only cell. The
/// search therefore branches on every cell, assigns that minimum, retires
/// the exhausted line and recurses; partial assignments already expanded
/// are skipped.
///
/// The cap bounds the number of nonzero components of p plus those of q
/// (InstanceTooLarge beyond it). Execution::parallel splits the search by
/// first cell under OpenMP; the result is the same set in the same order.
std::vector<VertexCoupling> enumerate_vertices(const ProbVec& p, const ProbVec& q,
                                               const Tolerances& tol = {},
                                               Execution exec = Execution::parallel,
                                               std::size_t cap = kDefaultOracleCap);

struct ExactResult {
    double opt_value = 0.0; // bits
    VertexCoupling argmin;
};

/// min over all couplings of H(N). Entropy is concave, so the minimum over
/// the polytope is attained at a vertex.
ExactResult exact_min_entropy(const ProbVec& p, const ProbVec& q,
                              const Tolerances& tol = {},
                              Execution exec = Execution::parallel,
                              std::size_t cap = kDefaultOracleCap);

} // namespace mec
