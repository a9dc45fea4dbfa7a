#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mec/error.hpp"

namespace mec {

struct Tolerances {
    double eps_sum = 1e-9;   // max |sum - 1| accepted on input
    double eps_zero = 1e-12; // residuals below this are exact zeros

    // Throws BadTolerance unless 0 < eps_zero < eps_sum < 1.
    void validate() const;
};

/// A discrete distribution stored in non-increasing order.
///
/// perm()[i] is the caller's index of the i-th largest component. Indices
/// >= source_size() denote zero padding added by pad_to().
class ProbVec {
public:
    /// Wraps values that are already sorted non-increasing and sum to one.
    /// Used for distributions produced internally (glb, half, joint values);
    /// the permutation is the identity. Checks sortedness and clamps
    /// residuals in [-eps_zero, 0) to zero.
    static ProbVec from_sorted(std::vector<double> values,
                               const Tolerances& tol = {});

    std::span<const double> values() const noexcept { return values_; }
    std::span<const std::size_t> perm() const noexcept { return perm_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::size_t source_size() const noexcept { return source_size_; }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Values scattered back into the caller's index order (length
    /// source_size()).
    std::vector<double> in_caller_order() const;

private:
    friend ProbVec make_probvec(std::span<const double>, const Tolerances&);
    friend ProbVec pad_to(const ProbVec&, std::size_t);

    ProbVec() = default;

    std::vector<double> values_;
    std::vector<std::size_t> perm_;
    std::size_t source_size_ = 0;
};

/// Validates raw (unordered) probabilities and sorts them descending.
/// Ties keep ascending original index. Total mass is never rescaled.
ProbVec make_probvec(std::span<const double> raw, const Tolerances& tol = {});

/// Appends zeros up to length n.
ProbVec pad_to(const ProbVec& p, std::size_t n);

/// Shannon entropy in bits with 0 log(1/0) = 0. Entries <= 0 are skipped.
double entropy(std::span<const double> values) noexcept;
inline double entropy(const ProbVec& p) noexcept { return entropy(p.values()); }

/// True iff b is majorized by a: every prefix sum of a is at least the
/// corresponding prefix sum of b, up to eps_zero. The shorter vector is
/// treated as zero-padded. Both inputs must already be sorted.
bool majorizes(std::span<const double> a, std::span<const double> b,
               double eps_zero = Tolerances{}.eps_zero) noexcept;
inline bool majorizes(const ProbVec& a, const ProbVec& b,
                      double eps_zero = Tolerances{}.eps_zero) noexcept {
    return majorizes(a.values(), b.values(), eps_zero);
}

/// Block sums of p over a partition of {0..p.size()-1}, re-sorted. Indices
/// refer to p's sorted positions.
ProbVec aggregate(const ProbVec& p,
                  const std::vector<std::vector<std::size_t>>& partition);

} // namespace mec
