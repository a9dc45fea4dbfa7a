#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mec/lattice.hpp"
#include "mec/prob_vec.hpp"

namespace mec {

/// Segment boundaries n+1 = i_0 > i_1 > ... > i_k = 1 (1-based). Segment s
/// covers [i_s, i_{s-1} - 1]; odd segments are p-segments (suffix sums of p
/// dominate those of q), even segments are q-segments.
///
/// When swapped is set, "p" and "q" above refer to the inputs exchanged, so
/// that at the largest index where they differ p is the larger one.
struct InversionPoints {
    std::vector<std::size_t> indices;
    bool swapped = false;

    std::size_t k() const noexcept { return indices.size() - 1; }
    static bool is_p_segment(std::size_t s) noexcept { return s % 2 == 1; }
};

/// Inputs must have equal length (LengthMismatch otherwise).
InversionPoints inversion_points(const ProbVec& p, const ProbVec& q,
                                 const Tolerances& tol = {});

/// Outcome of splitting z into a diagonal part z_d and a residual z_r so that
/// z_d plus the first `taken` entries of A add up to x.
struct SplitResult {
    double z_d = 0.0;
    double z_r = 0.0;
    std::size_t taken = 0; // Q = {0, ..., taken - 1} as offsets into A
};

/// Greedy prefix scan: absorb A[k] while sum + A[k] < x (raw floating-point
/// comparison), then z_d = x - sum. Throws InfeasibleSplit when z_d falls
/// outside [0, z] by more than eps_sum.
SplitResult split(double z, double x, std::span<const double> A,
                  const Tolerances& tol = {});

/// One nonzero cell of a coupling together with the index of the glb
/// component it was cut from. Coordinates are sorted positions.
struct Piece {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
    std::size_t origin = 0;
};

/// Dense n x n joint distribution in sorted coordinates: row i is the i-th
/// largest component of p, column j the j-th largest of q.
struct CouplingMatrix {
    std::size_t n = 0;
    std::vector<double> cells; // row-major
    std::vector<std::size_t> row_perm;
    std::vector<std::size_t> col_perm;
    std::size_t row_source = 0; // caller lengths, before padding
    std::size_t col_source = 0;
    std::vector<Piece> pieces;
    InversionPoints inversion;

    double at(std::size_t i, std::size_t j) const { return cells[i * n + j]; }
    std::size_t nnz(double eps_zero = Tolerances{}.eps_zero) const;
    double entropy() const { return mec::entropy(cells); }
    std::vector<double> row_sums() const;
    std::vector<double> col_sums() const;
    CouplingMatrix transposed() const;

    /// row_source x col_source matrix indexed by the callers' original
    /// positions; padded rows and columns are dropped.
    std::vector<std::vector<double>> in_caller_order() const;
    /// Same shape, sorted coordinates.
    std::vector<std::vector<double>> sorted_trimmed() const;
};

/// Two-marginal coupling whose entropy is at most H(p ∧ q) + 1 bit.
/// Inputs of different length are zero-padded to the longer one. O(n^2).
CouplingMatrix min_entropy_coupling(const ProbVec& p, const ProbVec& q,
                                    const Tolerances& tol = {});

namespace detail {

struct SortedCoupling {
    std::vector<Piece> pieces;
    InversionPoints inversion;
};

/// The coupling kernel on two sorted distributions of equal length. With
/// verify set, checks after every segment that all rows and columns at or
/// past the segment start carry exactly their marginal (InternalInvariant
/// otherwise).
SortedCoupling couple_sorted(const ProbVec& p, const ProbVec& q,
                             const Tolerances& tol, bool verify);

} // namespace detail

struct BoundsReport {
    double h_p = 0.0;
    double h_q = 0.0;
    double h_glb = 0.0;              // lower bound on any coupling's entropy
    double mi_upper_improved = 0.0;  // H(p) + H(q) - H(p ∧ q)
    double mi_upper_classic = 0.0;   // min(H(p), H(q))
    double joint_lower_classic = 0.0; // max(H(p), H(q))
};

BoundsReport bounds(const ProbVec& p, const ProbVec& q, const Tolerances& tol = {});

/// Certified interval for D(p, q) = 2 W(p, q) - H(p) - H(q), W the minimum
/// coupling entropy.
struct DistanceInterval {
    double lower = 0.0;    // from H(p ∧ q) <= W
    double upper = 0.0;    // from W <= H(M)
    double estimate = 0.0; // lower + 1
};

DistanceInterval distance_interval(const ProbVec& p, const ProbVec& q,
                                   const Tolerances& tol = {});

} // namespace mec
