#include "mec/coupling_k.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <string>
#include <tuple>

#include "mec/lattice.hpp"

namespace mec {

namespace {

// Distribution over tuples of `width` leaf indices, sorted by value.
struct Node {
    std::size_t width = 0;
    std::vector<double> values;
    std::vector<std::size_t> idx; // width per entry
    std::vector<std::size_t> origin;
    std::vector<double> children_glb;
};

Node leaf_node(const ProbVec& p) {
    Node n;
    n.width = 1;
    n.values.assign(p.values().begin(), p.values().end());
    n.idx.assign(p.perm().begin(), p.perm().end());
    return n;
}

ProbVec padded(const std::vector<double>& values, std::size_t n, const Tolerances& tol) {
    std::vector<double> v(values);
    v.resize(n, 0.0);
    return ProbVec::from_sorted(std::move(v), tol);
}

Node merge(const Node& left, const Node& right, const Tolerances& tol) {
    const std::size_t a = left.values.size();
    const std::size_t b = right.values.size();
    const std::size_t n = std::max(a, b);
    const ProbVec P = padded(left.values, n, tol);
    const ProbVec Q = padded(right.values, n, tol);

    detail::SortedCoupling sc = detail::couple_sorted(P, Q, tol, false);
    std::sort(sc.pieces.begin(), sc.pieces.end(), [](const Piece& x, const Piece& y) {
        return std::tie(x.row, x.col) < std::tie(y.row, y.col);
    });

    std::vector<std::size_t> order(sc.pieces.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return sc.pieces[x].value > sc.pieces[y].value;
    });

    Node out;
    out.width = left.width + right.width;
    out.values.reserve(order.size());
    out.idx.reserve(order.size() * out.width);
    out.origin.reserve(order.size());
    for (std::size_t w : order) {
        const Piece& pc = sc.pieces[w];
        if (pc.row >= a || pc.col >= b) {
            // Segment tests carry eps_zero slack, so rounding-level mass can
            // reach a zero-padded component.
            if (pc.value <= tol.eps_sum)
                continue;
            throw Error(ErrorCode::InternalInvariant, "mass placed on a padded component");
        }
        out.values.push_back(pc.value);
        out.origin.push_back(pc.origin);
        out.idx.insert(out.idx.end(), left.idx.begin() + pc.row * left.width,
                       left.idx.begin() + (pc.row + 1) * left.width);
        out.idx.insert(out.idx.end(), right.idx.begin() + pc.col * right.width,
                       right.idx.begin() + (pc.col + 1) * right.width);
    }
    const GlbResult g = glb(P, Q, tol);
    out.children_glb.assign(g.z.values().begin(), g.z.values().end());
    return out;
}

} // namespace

unsigned ceil_log2(std::size_t k) noexcept {
    unsigned r = 0;
    while ((std::size_t{1} << r) < k)
        ++r;
    return r;
}

SparseJoint k_min_entropy_coupling(std::span<const ProbVec> ps, const Tolerances& tol,
                                   Execution exec, MergeTrace* trace) {
    tol.validate();
    const std::size_t k = ps.size();
    if (k < 2)
        throw Error(ErrorCode::TooFewMarginals,
                    "need at least two marginals, got " + std::to_string(k));

    std::size_t n = 0;
    for (const ProbVec& p : ps)
        n = std::max(n, p.size());
    const std::size_t leaves = std::size_t{1} << ceil_log2(k);

    std::vector<double> point_mass(n, 0.0);
    point_mass[0] = 1.0;
    std::vector<ProbVec> leaf_dists;
    leaf_dists.reserve(leaves);
    for (const ProbVec& p : ps)
        leaf_dists.push_back(pad_to(p, n));
    while (leaf_dists.size() < leaves)
        leaf_dists.push_back(ProbVec::from_sorted(point_mass, tol));

    std::vector<Node> level_nodes;
    level_nodes.reserve(leaves);
    for (const ProbVec& p : leaf_dists)
        level_nodes.push_back(leaf_node(p));

    if (trace) {
        trace->leaves = leaf_dists;
        trace->nodes.clear();
    }

    for (unsigned level = 1; level_nodes.size() > 1; ++level) {
        const std::size_t count = level_nodes.size() / 2;
        std::vector<Node> next(count);
        if (exec == Execution::parallel && count > 1) {
            std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
            for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
                try {
                    next[i] = merge(level_nodes[2 * i], level_nodes[2 * i + 1], tol);
                } catch (...) {
#pragma omp critical(mec_merge_failure)
                    if (!failure)
                        failure = std::current_exception();
                }
            }
            if (failure)
                std::rethrow_exception(failure);
        } else {
            for (std::size_t i = 0; i < count; ++i)
                next[i] = merge(level_nodes[2 * i], level_nodes[2 * i + 1], tol);
        }

        if (trace) {
            const std::size_t span_width = std::size_t{1} << level;
            for (std::size_t i = 0; i < count; ++i) {
                MergeNode node;
                node.level = level;
                node.first_leaf = i * span_width;
                node.last_leaf = (i + 1) * span_width - 1;
                node.values = next[i].values;
                node.origin = next[i].origin;
                node.children_glb = next[i].children_glb;
                trace->nodes.push_back(std::move(node));
            }
        }
        level_nodes = std::move(next);
    }

    const Node& root = level_nodes.front();
    SparseJoint joint;
    joint.k = k;
    for (const ProbVec& p : ps)
        joint.dims.push_back(p.source_size());
    joint.values = root.values;
    joint.indices.reserve(root.values.size() * k);
    for (std::size_t e = 0; e < root.values.size(); ++e) {
        const auto first = root.idx.begin() + e * root.width;
        joint.indices.insert(joint.indices.end(), first, first + k);
        for (std::size_t j = 0; j < k; ++j)
            if (first[j] >= joint.dims[j])
                throw Error(ErrorCode::InternalInvariant, "mass placed on a padded index");
    }
    return joint;
}

std::vector<double> axis_sums(const SparseJoint& joint, std::size_t j) {
    if (j >= joint.k)
        throw Error(ErrorCode::AxisOutOfRange,
                    "axis " + std::to_string(j) + " out of range for a " +
                        std::to_string(joint.k) + "-way joint");
    std::vector<double> sums(joint.dims[j], 0.0);
    for (std::size_t e = 0; e < joint.size(); ++e)
        sums[joint.index(e)[j]] += joint.values[e];
    return sums;
}

ProbVec marginalize(std::size_t j, const SparseJoint& joint, const Tolerances& tol) {
    const std::vector<double> sums = axis_sums(joint, j);
    return make_probvec(sums, tol);
}

std::vector<double> densify(const SparseJoint& joint, std::size_t cap) {
    std::size_t cells = 1;
    for (std::size_t d : joint.dims) {
        if (d != 0 && cells > cap / d)
            throw Error(ErrorCode::InstanceTooLarge,
                        "dense tensor exceeds " + std::to_string(cap) + " cells");
        cells *= d;
    }
    if (cells > cap)
        throw Error(ErrorCode::InstanceTooLarge,
                    "dense tensor exceeds " + std::to_string(cap) + " cells");
    std::vector<double> dense(cells, 0.0);
    for (std::size_t e = 0; e < joint.size(); ++e) {
        std::size_t flat = 0;
        const auto idx = joint.index(e);
        for (std::size_t j = 0; j < joint.k; ++j)
            flat = flat * joint.dims[j] + idx[j];
        dense[flat] += joint.values[e];
    }
    return dense;
}

} // namespace mec
