// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Every criterion runs to completion so the report is complete.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mec/coupling2.hpp"
#include "mec/coupling_k.hpp"
#include "mec/lattice.hpp"
#include "mec/oracle.hpp"
#include "support/generators.hpp"
#include "support/reference.hpp"

using namespace mec;
using mec::testing::Rng;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> vec(const ProbVec& p) { return {p.values().begin(), p.values().end()}; }

struct Outcome {
    bool pass = true;
    std::string detail;
    void fail(const std::string& why) {
        if (pass)
            detail = why;
        pass = false;
    }
};

// Random pair on a common support size drawn uniformly from [lo, hi].
std::pair<ProbVec, ProbVec> simplex_pair(Rng& rng, std::size_t lo, std::size_t hi) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    return {testing::random_probvec(rng, n), testing::random_probvec(rng, n)};
}

Outcome golden() {
    Outcome o;
    const auto p = make_probvec(testing::kWorkedP);
    const auto q = make_probvec(testing::kWorkedQ);
    const auto t0 = Clock::now();
    const auto g = glb(p, q);
    const auto inv = inversion_points(p, q);
    const auto m = min_entropy_coupling(p, q);
    const double ms = seconds_since(t0) * 1e3;

    double z_err = 0.0, m_err = 0.0;
    for (std::size_t i = 0; i < 13; ++i) {
        z_err = std::max(z_err, std::abs(g.z[i] - testing::kWorkedZ[i]));
        for (std::size_t j = 0; j < 13; ++j)
            m_err = std::max(m_err, std::abs(m.at(i, j) - testing::kWorkedM[i][j]));
    }
    if (z_err > 1e-12)
        o.fail("z deviates by " + std::to_string(z_err));
    if (inv.indices != testing::kWorkedInversion || inv.swapped)
        o.fail("inversion points differ");
    if (m_err > 1e-9)
        o.fail("matrix deviates by " + std::to_string(m_err));
    const std::string blocks =
        testing::segment_block_violation(testing::dense_rows(m), vec(g.z), inv.indices, 1e-9);
    if (!blocks.empty())
        o.fail(blocks);
    if (ms >= 10.0)
        o.fail("took " + std::to_string(ms) + " ms");
    char buf[160];
    std::snprintf(buf, sizeof buf, "max |dz| %.1e, max |dM| %.1e, %.3f ms", z_err, m_err, ms);
    if (o.pass)
        o.detail = buf;
    return o;
}

struct PairRun {
    double worst_marginal = 0.0;
    double min_gap = 1e300;
    double max_gap = -1e300;
    std::size_t worst_nnz_slack = 0; // max of nnz - 2n when positive
    double seconds = 0.0;
};

PairRun random_pairs() {
    Rng rng(2024);
    PairRun r;
    const auto t0 = Clock::now();
    for (int t = 0; t < 10'000; ++t) {
        const auto [p, q] = simplex_pair(rng, 2, 64);
        const auto m = min_entropy_coupling(p, q);
        const auto rs = m.row_sums();
        const auto cs = m.col_sums();
        for (std::size_t i = 0; i < m.n; ++i)
            r.worst_marginal = std::max({r.worst_marginal, std::abs(rs[i] - p[i]),
                                         std::abs(cs[i] - q[i])});
        const double gap = m.entropy() - entropy(glb(p, q).z);
        r.min_gap = std::min(r.min_gap, gap);
        r.max_gap = std::max(r.max_gap, gap);
        const std::size_t nnz = m.nnz();
        if (nnz > 2 * m.n)
            r.worst_nnz_slack = std::max(r.worst_nnz_slack, nnz - 2 * m.n);
    }
    r.seconds = seconds_since(t0);
    return r;
}

Outcome marginals(const PairRun& r) {
    Outcome o;
    char buf[160];
    std::snprintf(buf, sizeof buf, "10000 pairs, max marginal deviation %.2e, %.2f s",
                  r.worst_marginal, r.seconds);
    o.detail = buf;
    if (r.worst_marginal > 1e-9)
        o.pass = false;
    if (r.seconds >= 30.0)
        o.pass = false;
    return o;
}

Outcome sandwich(const PairRun& r) {
    Outcome o;
    char buf[160];
    std::snprintf(buf, sizeof buf, "gap H(M)-H(z) in [%.3e, %.6f], nnz excess over 2n: %zu",
                  r.min_gap, r.max_gap, r.worst_nnz_slack);
    o.detail = buf;
    if (r.min_gap < 0.0 || r.max_gap > 1.0 || r.worst_nnz_slack > 0)
        o.pass = false;
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    Rng rng(77);
    std::uniform_int_distribution<std::size_t> len(1, 4);
    const auto t0 = Clock::now();
    double worst_excess = 0.0;
    for (int t = 0; t < 500; ++t) {
        const auto p = testing::random_mixed(rng, len(rng));
        const auto q = testing::random_mixed(rng, len(rng));
        const double hz = entropy(glb(p, q).z);
        const double opt = exact_min_entropy(p, q).opt_value;
        const double hm = min_entropy_coupling(p, q).entropy();
        worst_excess = std::max(worst_excess, hm - opt);
        if (!(hz <= opt + 1e-12 && opt <= hm + 1e-12 && hm <= hz + 1.0))
            o.fail("chain broken on instance " + std::to_string(t));
    }
    const auto p = make_probvec(std::vector<double>{0.5, 0.5});
    const auto q = make_probvec(std::vector<double>{0.6, 0.4});
    const double opt = exact_min_entropy(p, q).opt_value;
    const double hm = min_entropy_coupling(p, q).entropy();
    if (std::abs(hm - opt) > 1e-9 || std::abs(opt - 1.360964047443681174) > 1e-9)
        o.fail("hand instance: H(M) " + std::to_string(hm) + ", OPT " + std::to_string(opt));
    const double secs = seconds_since(t0);
    if (secs >= 60.0)
        o.fail("took " + std::to_string(secs) + " s");
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "500 pairs, max H(M)-OPT %.4f bits; (0.5,0.5)/(0.6,0.4): OPT %.12f = H(M); %.2f s",
                  worst_excess, opt, secs);
    if (o.pass)
        o.detail = buf;
    return o;
}

struct KRun {
    Outcome bound;
    Outcome chain;
};

KRun k_way() {
    KRun r;
    Rng rng(99);
    std::uniform_int_distribution<std::size_t> len(1, 8);
    std::size_t nodes_checked = 0;
    double worst_marginal = 0.0, worst_slack = 1e300;
    const auto t0 = Clock::now();
    for (std::size_t k : {2u, 3u, 4u, 8u}) {
        const unsigned log_k = ceil_log2(k);
        for (int t = 0; t < 200; ++t) {
            std::vector<ProbVec> ps;
            for (std::size_t i = 0; i < k; ++i)
                ps.push_back(testing::random_probvec(rng, len(rng)));
            MergeTrace trace;
            const auto joint = k_min_entropy_coupling(ps, {}, Execution::parallel,
                                                      k == 8 ? &trace : nullptr);
            for (std::size_t a = 0; a < k; ++a) {
                const auto sums = axis_sums(joint, a);
                const auto want = ps[a].in_caller_order();
                for (std::size_t i = 0; i < want.size(); ++i)
                    worst_marginal = std::max(worst_marginal, std::abs(sums[i] - want[i]));
            }
            const double gap = joint.entropy() - entropy(glb_all(ps));
            worst_slack = std::min(worst_slack, log_k - gap);
            if (gap < -1e-12 || gap > log_k)
                r.bound.fail("k=" + std::to_string(k) + " gap " + std::to_string(gap));

            for (const MergeNode& node : trace.nodes) {
                const std::vector<ProbVec> below(trace.leaves.begin() + node.first_leaf,
                                                 trace.leaves.begin() + node.last_leaf + 1);
                ++nodes_checked;
                if (!majorizes(node.values, half_pow(glb_all(below), node.level).values()))
                    r.chain.fail("node at level " + std::to_string(node.level) + ", instance " +
                                 std::to_string(t));
            }
        }
    }
    const double secs = seconds_since(t0);
    if (worst_marginal > 1e-9)
        r.bound.fail("marginal deviation " + std::to_string(worst_marginal));
    if (secs >= 60.0)
        r.bound.fail("took " + std::to_string(secs) + " s");
    char buf[200];
    if (r.bound.pass) {
        std::snprintf(buf, sizeof buf,
                      "k in {2,3,4,8} x 200, max marginal deviation %.2e, min slack to "
                      "ceil(log2 k) %.4f bits, %.2f s",
                      worst_marginal, worst_slack, secs);
        r.bound.detail = buf;
    }
    if (r.chain.pass) {
        std::snprintf(buf, sizeof buf, "%zu internal nodes over 200 instances with k = 8",
                      nodes_checked);
        r.chain.detail = buf;
    }
    return r;
}

Outcome half_identities() {
    Outcome o;
    Rng rng(314);
    std::uniform_int_distribution<std::size_t> len(1, 32);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const auto p = testing::random_mixed(rng, len(rng));
        for (unsigned i = 0; i <= 5; ++i)
            worst = std::max(worst, std::abs(entropy(half_pow(p, i)) - entropy(p) - i));

        const auto q = testing::random_mixed(rng, len(rng));
        const auto lower = testing::doubly_stochastic_average(rng, q);
        if (!majorizes(q, lower))
            o.fail("generator produced an incomparable pair");
        if (!majorizes(half(q), half(lower)))
            o.fail("half not monotone on pair " + std::to_string(t));
        for (unsigned i = 1; i <= 3; ++i)
            if (!majorizes(glb(half_pow(lower, i), half_pow(q, i)).z,
                           half_pow(glb(lower, q).z, i)))
                o.fail("half_pow(p ^ q) not below the glb of halves, pair " + std::to_string(t));
    }
    if (worst > 1e-12)
        o.fail("entropy identity off by " + std::to_string(worst));
    char buf[160];
    std::snprintf(buf, sizeof buf, "1000 pairs, max |H(half^i p) - H(p) - i| %.2e", worst);
    if (o.pass)
        o.detail = buf;
    return o;
}

// Items 1-6 of the suffix/boundary identities for z against the oriented pair.
std::string glb_structure_violation(const ProbVec& p_in, const ProbVec& q_in) {
    const std::size_t n = p_in.size();
    const auto g = glb(p_in, q_in);
    const auto inv = inversion_points(p_in, q_in);
    const ProbVec& p = inv.swapped ? q_in : p_in;
    const ProbVec& q = inv.swapped ? p_in : q_in;
    const auto& z = g.z;
    constexpr double tol = 1e-12;

    for (std::size_t i = 0; i + 1 < n; ++i)
        if (z[i] < z[i + 1])
            return "z not non-increasing";
    long double P = 0.0L, Q = 0.0L, Z = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        P += p[i];
        Q += q[i];
        Z += z[i];
        if (std::abs(static_cast<double>(Z - std::min(P, Q))) > tol)
            return "prefix-min identity fails at " + std::to_string(i + 1);
    }

    // 1-based suffix sums
    std::vector<long double> sp(n + 2, 0.0L), sq(n + 2, 0.0L), sz(n + 2, 0.0L);
    for (std::size_t i = n; i >= 1; --i) {
        sp[i] = sp[i + 1] + p[i - 1];
        sq[i] = sq[i + 1] + q[i - 1];
        sz[i] = sz[i + 1] + z[i - 1];
    }
    const auto& ix = inv.indices;
    const std::size_t k = inv.k();
    for (std::size_t s = 1; s <= k; ++s) {
        const bool odd = s % 2 == 1;
        for (std::size_t i = ix[s]; i <= ix[s - 1] - 1; ++i) {
            const long double want = odd ? sp[i] : sq[i];
            if (std::abs(static_cast<double>(sz[i] - want)) > tol)
                return "suffix identity, segment " + std::to_string(s) + ", i " +
                       std::to_string(i);
            const double wi = odd ? p[i - 1] : q[i - 1];
            if (i + 2 <= ix[s - 1] && std::abs(z[i - 1] - wi) > tol)
                return "interior identity, segment " + std::to_string(s) + ", i " +
                       std::to_string(i);
        }
    }
    for (std::size_t s = 0; s < k; ++s) {
        const std::size_t b = ix[s] - 1;
        const long double diff = s % 2 == 1 ? sp[ix[s]] - sq[ix[s]] : sq[ix[s]] - sp[ix[s]];
        const double want = static_cast<double>((s % 2 == 1 ? q[b - 1] : p[b - 1]) - diff);
        const double floor = s % 2 == 1 ? p[b - 1] : q[b - 1];
        if (std::abs(z[b - 1] - want) > tol || z[b - 1] < floor - tol)
            return "boundary identity at i_" + std::to_string(s) + " - 1";
    }
    return {};
}

Outcome glb_suite() {
    Outcome o;
    Rng rng(4242);
    std::uniform_int_distribution<std::size_t> len(1, 64);
    std::size_t segments = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = len(rng);
        const auto p = testing::random_mixed(rng, n);
        const auto q = testing::random_mixed(rng, n);
        segments += inversion_points(p, q).k();
        const std::string why = glb_structure_violation(p, q);
        if (!why.empty())
            o.fail("pair " + std::to_string(t) + ": " + why);
    }
    if (o.pass)
        o.detail = "1000 pairs, " + std::to_string(segments) + " segments checked";
    return o;
}

Outcome complexity() {
    Outcome o;
    Rng rng(8);
    const std::vector<std::size_t> sizes{512, 1024, 2048, 4096};
    std::vector<double> times;
    for (std::size_t n : sizes) {
        const auto p = testing::random_probvec(rng, n);
        const auto q = testing::random_probvec(rng, n);
        std::vector<double> runs;
        for (int rep = 0; rep < 3; ++rep) {
            const auto t0 = Clock::now();
            const auto m = min_entropy_coupling(p, q);
            runs.push_back(seconds_since(t0));
            if (m.n != n)
                o.fail("wrong size");
        }
        std::sort(runs.begin(), runs.end());
        times.push_back(runs[1]);
    }
    // least-squares slope of log t against log n
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double cnt = static_cast<double>(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const double x = std::log(static_cast<double>(sizes[i]));
        const double y = std::log(times[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    if (slope > 2.3)
        o.fail("exponent " + std::to_string(slope));
    if (times.back() >= 5.0)
        o.fail("n = 4096 took " + std::to_string(times.back()) + " s");
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "median s at n=512..4096: %.4f %.4f %.4f %.4f, fitted exponent %.2f",
                  times[0], times[1], times[2], times[3], slope);
    if (o.pass)
        o.detail = buf;
    return o;
}

} // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char* name, const Outcome& o) {
        std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass)
            ++failures;
    };
    auto guarded = [](const std::function<Outcome()>& f) {
        try {
            return f();
        } catch (const std::exception& e) {
            Outcome o;
            o.fail(std::string("exception: ") + e.what());
            return o;
        }
    };

    report(1, "worked 13-component example", guarded(golden));
    PairRun pairs;
    Outcome pairs_error;
    try {
        pairs = random_pairs();
    } catch (const std::exception& e) {
        pairs_error.fail(std::string("exception: ") + e.what());
    }
    report(2, "marginal correctness", pairs_error.pass ? marginals(pairs) : pairs_error);
    report(3, "entropy sandwich and sparsity", pairs_error.pass ? sandwich(pairs) : pairs_error);
    report(4, "agreement with the exact optimum", guarded(oracle_equivalence));
    KRun kr;
    try {
        kr = k_way();
    } catch (const std::exception& e) {
        kr.bound.fail(std::string("exception: ") + e.what());
        kr.chain.fail(std::string("exception: ") + e.what());
    }
    report(5, "k-marginal log2 bound", kr.bound);
    report(6, "merge-tree majorization chain", kr.chain);
    report(7, "half identities", guarded(half_identities));
    report(8, "glb structure", guarded(glb_suite));
    report(9, "quadratic scaling", guarded(complexity));

    std::printf("%d of 9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
