#include "mec/coupling2.hpp"

#include <algorithm>
#include <cmath>
#include <ranges>
#include <sstream>
#include <string>

namespace mec {

namespace {

std::vector<double> suffix_sums(std::span<const double> v) {
    std::vector<double> s(v.size() + 1, 0.0);
    for (std::size_t i = v.size(); i-- > 0;)
        s[i] = s[i + 1] + v[i];
    return s;
}

// True when p should be exchanged with q so that, at the largest index where
// they differ, p carries more mass.
bool needs_swap(const ProbVec& p, const ProbVec& q, double eps_zero) {
    for (std::size_t i = p.size(); i-- > 0;)
        if (std::abs(p[i] - q[i]) > eps_zero)
            return p[i] < q[i];
    return false;
}

bool all_equal(const ProbVec& p, const ProbVec& q, double eps_zero) {
    for (std::size_t i = 0; i < p.size(); ++i)
        if (std::abs(p[i] - q[i]) > eps_zero)
            return false;
    return true;
}

[[noreturn]] void invariant_broken(const std::string& what) {
    throw Error(ErrorCode::InternalInvariant, what);
}

// Greedy split over A in iteration order: absorb entries while
// the running sum stays strictly below x.
template <std::ranges::input_range Range>
SplitResult greedy_split(double z, double x, Range&& A, const Tolerances& tol) {
    SplitResult r;
    double sum = 0.0;
    for (double a : A) {
        if (!(sum + a < x))
            break;
        sum += a;
        ++r.taken;
    }
    double z_d = x - sum;
    if (z_d < -tol.eps_sum || z_d > z + tol.eps_sum) {
        std::ostringstream os;
        os.precision(17);
        os << "cannot split z=" << z << " to reach x=" << x << " (diagonal part "
           << z_d << ")";
        throw Error(ErrorCode::InfeasibleSplit, os.str());
    }
    z_d = std::clamp(z_d, 0.0, z);
    r.z_d = z_d;
    r.z_r = z - z_d;
    return r;
}

} // namespace

InversionPoints inversion_points(const ProbVec& p, const ProbVec& q,
                                 const Tolerances& tol) {
    if (p.size() != q.size())
        throw Error(ErrorCode::LengthMismatch,
                    "inversion points need equal lengths (" + std::to_string(p.size()) +
                        " vs " + std::to_string(q.size()) + ")");
    const std::size_t n = p.size();

    InversionPoints ip;
    ip.swapped = needs_swap(p, q, tol.eps_zero);
    const ProbVec& a = ip.swapped ? q : p;
    const ProbVec& b = ip.swapped ? p : q;
    const auto sa = suffix_sums(a.values());
    const auto sb = suffix_sums(b.values());

    ip.indices.push_back(n + 1);
    for (std::size_t s = 1; ip.indices.back() != 1; ++s) {
        const std::size_t prev = ip.indices.back();
        const bool odd = InversionPoints::is_p_segment(s);
        // 1-based index i holds when the segment's dominance condition is met
        // at suffix i.
        auto holds = [&](std::size_t i) {
            return odd ? sa[i - 1] >= sb[i - 1] - tol.eps_zero
                       : sa[i - 1] <= sb[i - 1] + tol.eps_zero;
        };
        std::size_t i = prev - 1;
        while (i >= 1 && holds(i))
            --i;
        if (i + 1 == prev)
            invariant_broken("empty segment while computing inversion points");
        ip.indices.push_back(i + 1);
    }
    return ip;
}

SplitResult split(double z, double x, std::span<const double> A,
                  const Tolerances& tol) {
    return greedy_split(z, x, A, tol);
}

namespace detail {

SortedCoupling couple_sorted(const ProbVec& p, const ProbVec& q,
                             const Tolerances& tol, bool verify) {
    const std::size_t n = p.size();
    SortedCoupling out;
    out.inversion = inversion_points(p, q, tol);
    const GlbResult g = glb(p, q, tol);
    const auto z = g.z.values();

    if (all_equal(p, q, tol.eps_zero)) {
        for (std::size_t j = 0; j < n; ++j)
            if (z[j] > 0.0)
                out.pieces.push_back({j, j, z[j], j});
        return out;
    }

    const bool swapped = out.inversion.swapped;
    const ProbVec& rows = swapped ? q : p; // marginal satisfied along rows
    const ProbVec& cols = swapped ? p : q;

    std::vector<double> R(n, 0.0);
    std::vector<double> C(n, 0.0);
    std::vector<double> row_sum;
    std::vector<double> col_sum;
    if (verify) {
        row_sum.assign(n, 0.0);
        col_sum.assign(n, 0.0);
    }

    auto emit = [&](std::size_t r, std::size_t c, double v, std::size_t origin) {
        if (v <= 0.0)
            return;
        if (verify) {
            row_sum[r] += v;
            col_sum[c] += v;
        }
        if (swapped)
            out.pieces.push_back({c, r, v, origin});
        else
            out.pieces.push_back({r, c, v, origin});
    };
    auto residual = [&](double v) { return v < tol.eps_zero ? 0.0 : v; };

    const auto& idx = out.inversion.indices;
    for (std::size_t s = 1; s < idx.size(); ++s) {
        // 0-based half-open range [lo, hi) of segment s.
        const std::size_t lo = idx[s] - 1;
        const std::size_t hi = idx[s - 1] - 1;
        const bool p_segment = InversionPoints::is_p_segment(s);
        std::vector<double>& pending = p_segment ? R : C;
        const ProbVec& target = p_segment ? cols : rows;

        for (std::size_t j = hi; j-- > lo;) {
            // Pending residuals are offered oldest first, i.e. from the top
            // of the segment down to j + 1.
            const std::span<const double> A(pending.data() + j + 1, hi - (j + 1));
            const SplitResult sr = greedy_split(z[j], target[j], A | std::views::reverse, tol);
            for (std::size_t l = hi - sr.taken; l < hi; ++l) {
                if (p_segment)
                    emit(l, j, pending[l], l);
                else
                    emit(j, l, pending[l], l);
                pending[l] = 0.0;
            }
            emit(j, j, sr.z_d, j);
            pending[j] = residual(sr.z_r);
        }
        if (lo != 0) {
            for (std::size_t l = lo; l < hi; ++l) {
                if (pending[l] == 0.0)
                    continue;
                if (p_segment)
                    emit(l, lo - 1, pending[l], l);
                else
                    emit(lo - 1, l, pending[l], l);
                pending[l] = 0.0;
            }
        }
        if (verify) {
            // 2 eps_sum: the inputs' totals may differ by that much.
            for (std::size_t i = lo; i < hi; ++i) {
                if (std::abs(row_sum[i] - rows[i]) > 2.0 * tol.eps_sum ||
                    std::abs(col_sum[i] - cols[i]) > 2.0 * tol.eps_sum)
                    invariant_broken("row/column " + std::to_string(i) +
                                     " unsatisfied after segment " + std::to_string(s));
            }
        }
    }

    // What is still pending belongs to the last segment and is the surplus of
    // the heavier marginal (totals may differ by up to 2 eps_sum). It goes to
    // the first column (p-segment) or row (q-segment).
    const bool last_p = InversionPoints::is_p_segment(idx.size() - 1);
    double surplus = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        const double v = last_p ? R[l] : C[l];
        if ((last_p ? C[l] : R[l]) != 0.0)
            invariant_broken("residual left at index " + std::to_string(l));
        if (v == 0.0)
            continue;
        surplus += v;
        const std::size_t r = last_p ? l : 0;
        const std::size_t c = last_p ? 0 : l;
        const std::size_t pr = swapped ? c : r;
        const std::size_t pc = swapped ? r : c;
        if (l == 0 && !out.pieces.empty() && out.pieces.back().row == 0 &&
            out.pieces.back().col == 0) {
            out.pieces.back().value += v; // both halves of z_0 share cell (0, 0)
        } else {
            out.pieces.push_back({pr, pc, v, l});
        }
    }
    if (surplus > 2.0 * tol.eps_sum)
        invariant_broken("residual mass " + std::to_string(surplus) + " left after the last segment");
    return out;
}

} // namespace detail

CouplingMatrix min_entropy_coupling(const ProbVec& p_in, const ProbVec& q_in,
                                    const Tolerances& tol) {
    tol.validate();
    const std::size_t n = std::max(p_in.size(), q_in.size());
    const ProbVec p = pad_to(p_in, n);
    const ProbVec q = pad_to(q_in, n);

#ifdef NDEBUG
    constexpr bool verify = false;
#else
    constexpr bool verify = true;
#endif
    detail::SortedCoupling sc = detail::couple_sorted(p, q, tol, verify);

    CouplingMatrix m;
    m.n = n;
    m.cells.assign(n * n, 0.0);
    for (const Piece& pc : sc.pieces) {
        double& cell = m.cells[pc.row * n + pc.col];
        if (cell != 0.0)
            invariant_broken("cell (" + std::to_string(pc.row) + ", " +
                             std::to_string(pc.col) + ") written twice");
        cell = pc.value;
    }
    m.row_perm.assign(p.perm().begin(), p.perm().end());
    m.col_perm.assign(q.perm().begin(), q.perm().end());
    m.row_source = p_in.source_size();
    m.col_source = q_in.source_size();
    m.pieces = std::move(sc.pieces);
    m.inversion = std::move(sc.inversion);
    return m;
}

std::size_t CouplingMatrix::nnz(double eps_zero) const {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [&](double v) { return v > eps_zero; }));
}

std::vector<double> CouplingMatrix::row_sums() const {
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            s[i] += cells[i * n + j];
    return s;
}

std::vector<double> CouplingMatrix::col_sums() const {
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            s[j] += cells[i * n + j];
    return s;
}

CouplingMatrix CouplingMatrix::transposed() const {
    CouplingMatrix t = *this;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            t.cells[j * n + i] = cells[i * n + j];
    std::swap(t.row_perm, t.col_perm);
    std::swap(t.row_source, t.col_source);
    for (Piece& pc : t.pieces)
        std::swap(pc.row, pc.col);
    return t;
}

std::vector<std::vector<double>> CouplingMatrix::in_caller_order() const {
    std::vector<std::vector<double>> out(row_source, std::vector<double>(col_source, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        if (row_perm[i] >= row_source)
            continue;
        for (std::size_t j = 0; j < n; ++j)
            if (col_perm[j] < col_source)
                out[row_perm[i]][col_perm[j]] = cells[i * n + j];
    }
    return out;
}

std::vector<std::vector<double>> CouplingMatrix::sorted_trimmed() const {
    std::vector<std::vector<double>> out(row_source, std::vector<double>(col_source, 0.0));
    for (std::size_t i = 0; i < row_source; ++i)
        for (std::size_t j = 0; j < col_source; ++j)
            out[i][j] = cells[i * n + j];
    return out;
}

BoundsReport bounds(const ProbVec& p, const ProbVec& q, const Tolerances& tol) {
    BoundsReport b;
    b.h_p = entropy(p);
    b.h_q = entropy(q);
    b.h_glb = entropy(glb(p, q, tol).z);
    b.mi_upper_improved = b.h_p + b.h_q - b.h_glb;
    b.mi_upper_classic = std::min(b.h_p, b.h_q);
    b.joint_lower_classic = std::max(b.h_p, b.h_q);
    return b;
}

DistanceInterval distance_interval(const ProbVec& p, const ProbVec& q,
                                   const Tolerances& tol) {
    const double hp = entropy(p);
    const double hq = entropy(q);
    const double hz = entropy(glb(p, q, tol).z);
    const double hm = min_entropy_coupling(p, q, tol).entropy();
    DistanceInterval d;
    d.lower = 2.0 * hz - hp - hq;
    d.upper = 2.0 * hm - hp - hq;
    d.estimate = d.lower + 1.0;
    return d;
}

} // namespace mec
