#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mec/coupling2.hpp"
#include "mec/prob_vec.hpp"

namespace mec {

enum class Execution { serial, parallel };

/// Sparse k-dimensional joint distribution: entry e has probability
/// values[e] at the k-tuple index(e), one caller index per marginal.
struct SparseJoint {
    std::size_t k = 0;
    std::vector<std::size_t> dims;    // caller length of each marginal
    std::vector<double> values;       // non-increasing
    std::vector<std::size_t> indices; // k per entry, entry-major

    std::size_t size() const noexcept { return values.size(); }
    std::span<const std::size_t> index(std::size_t e) const {
        return {indices.data() + e * k, k};
    }
    double entropy() const { return mec::entropy(values); }
};

/// One internal node of the merge tree. Leaves first_leaf..last_leaf (into
/// MergeTrace::leaves) were coupled; level is the height above the leaves.
struct MergeNode {
    unsigned level = 0;
    std::size_t first_leaf = 0;
    std::size_t last_leaf = 0;
    std::vector<double> values;       // sorted joint values at this node
    std::vector<std::size_t> origin;  // per value: glb component it came from
    std::vector<double> children_glb; // glb of the two children's vectors
};

struct MergeTrace {
    std::vector<ProbVec> leaves; // padded to a power of two with point masses
    std::vector<MergeNode> nodes;
};

/// Joint distribution of k >= 2 marginals built by pairwise coupling along a
/// balanced binary tree; entropy at most H(p1 ∧ ... ∧ pk) + ceil(log2 k).
///
/// When k is not a power of two the leaf list is completed with point
/// masses (1, 0, ..., 0), whose axes are dropped from the result. Merges on
/// the same level are independent; Execution::parallel runs them under
/// OpenMP and produces output identical to Execution::serial.
SparseJoint k_min_entropy_coupling(std::span<const ProbVec> ps,
                                   const Tolerances& tol = {},
                                   Execution exec = Execution::parallel,
                                   MergeTrace* trace = nullptr);

/// Sums of the joint's mass by the j-th coordinate, in caller index order.
std::vector<double> axis_sums(const SparseJoint& joint, std::size_t j);

/// The j-th marginal of the joint as a validated distribution.
ProbVec marginalize(std::size_t j, const SparseJoint& joint, const Tolerances& tol = {});

/// Dense row-major tensor over dims (last axis fastest). Throws
/// InstanceTooLarge when the cell count exceeds cap.
std::vector<double> densify(const SparseJoint& joint, std::size_t cap = 1'000'000);

/// ceil(log2 k) for k >= 1.
unsigned ceil_log2(std::size_t k) noexcept;

} // namespace mec
