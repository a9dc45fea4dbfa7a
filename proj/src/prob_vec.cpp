#include "mec/prob_vec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace mec {

std::string_view code_name(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::NegativeMass: return "NegativeMass";
    case ErrorCode::BadTotal: return "BadTotal";
    case ErrorCode::BadTolerance: return "BadTolerance";
    case ErrorCode::ShrinkRequested: return "ShrinkRequested";
    case ErrorCode::BadPartition: return "BadPartition";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InfeasibleSplit: return "InfeasibleSplit";
    case ErrorCode::InternalInvariant: return "InternalInvariant";
    case ErrorCode::TooFewMarginals: return "TooFewMarginals";
    case ErrorCode::AxisOutOfRange: return "AxisOutOfRange";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

void Tolerances::validate() const {
    if (!(eps_zero > 0.0 && eps_zero < eps_sum && eps_sum < 1.0)) {
        std::ostringstream os;
        os << "tolerances must satisfy 0 < eps_zero < eps_sum < 1 (got eps_zero="
           << eps_zero << ", eps_sum=" << eps_sum << ")";
        throw Error(ErrorCode::BadTolerance, os.str());
    }
}

namespace {

void check_total(double total, const Tolerances& tol) {
    if (std::abs(total - 1.0) > tol.eps_sum) {
        std::ostringstream os;
        os.precision(17);
        os << "total mass " << total << " differs from 1 by more than " << tol.eps_sum;
        throw Error(ErrorCode::BadTotal, os.str());
    }
}

} // namespace

ProbVec ProbVec::from_sorted(std::vector<double> values, const Tolerances& tol) {
    if (values.empty())
        throw Error(ErrorCode::Empty, "distribution has no components");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < -tol.eps_zero)
            throw Error(ErrorCode::NegativeMass,
                        "component " + std::to_string(i) + " is negative");
        if (values[i] < 0.0)
            values[i] = 0.0;
        if (i > 0 && values[i] > values[i - 1] + tol.eps_zero)
            throw Error(ErrorCode::InternalInvariant,
                        "values are not sorted non-increasing at " + std::to_string(i));
    }
    check_total(std::accumulate(values.begin(), values.end(), 0.0), tol);

    ProbVec p;
    p.perm_.resize(values.size());
    std::iota(p.perm_.begin(), p.perm_.end(), std::size_t{0});
    p.source_size_ = values.size();
    p.values_ = std::move(values);
    return p;
}

std::vector<double> ProbVec::in_caller_order() const {
    std::vector<double> out(source_size_, 0.0);
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (perm_[i] < source_size_)
            out[perm_[i]] = values_[i];
    return out;
}

ProbVec make_probvec(std::span<const double> raw, const Tolerances& tol) {
    if (raw.empty())
        throw Error(ErrorCode::Empty, "distribution has no components");

    double total = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!std::isfinite(raw[i]) || raw[i] < -tol.eps_zero) {
            std::ostringstream os;
            os.precision(17);
            os << "component " << i << " = " << raw[i] << " is not a valid probability";
            throw Error(ErrorCode::NegativeMass, os.str());
        }
        total += std::max(raw[i], 0.0);
    }
    check_total(total, tol);

    ProbVec p;
    p.source_size_ = raw.size();
    p.perm_.resize(raw.size());
    std::iota(p.perm_.begin(), p.perm_.end(), std::size_t{0});
    std::stable_sort(p.perm_.begin(), p.perm_.end(),
                     [&](std::size_t a, std::size_t b) { return raw[a] > raw[b]; });
    p.values_.reserve(raw.size());
    for (std::size_t i : p.perm_)
        p.values_.push_back(std::max(raw[i], 0.0));
    return p;
}

ProbVec pad_to(const ProbVec& p, std::size_t n) {
    if (n < p.size())
        throw Error(ErrorCode::ShrinkRequested,
                    "cannot pad a length-" + std::to_string(p.size()) +
                        " distribution to length " + std::to_string(n));
    ProbVec out = p;
    std::size_t next = p.size();
    out.values_.resize(n, 0.0);
    out.perm_.reserve(n);
    while (out.perm_.size() < n)
        out.perm_.push_back(next++);
    return out;
}

double entropy(std::span<const double> values) noexcept {
    double h = 0.0;
    for (double v : values)
        if (v > 0.0)
            h -= v * std::log2(v);
    return h;
}

bool majorizes(std::span<const double> a, std::span<const double> b,
               double eps_zero) noexcept {
    const std::size_t n = std::max(a.size(), b.size());
    double sa = 0.0;
    double sb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < a.size()) sa += a[i];
        if (i < b.size()) sb += b[i];
        if (sa < sb - eps_zero)
            return false;
    }
    return true;
}

ProbVec aggregate(const ProbVec& p,
                  const std::vector<std::vector<std::size_t>>& partition) {
    std::vector<char> seen(p.size(), 0);
    std::vector<double> sums;
    sums.reserve(partition.size());
    for (const auto& block : partition) {
        if (block.empty())
            throw Error(ErrorCode::BadPartition, "partition contains an empty block");
        double s = 0.0;
        for (std::size_t i : block) {
            if (i >= p.size())
                throw Error(ErrorCode::BadPartition,
                            "index " + std::to_string(i) + " is out of range");
            if (seen[i])
                throw Error(ErrorCode::BadPartition,
                            "index " + std::to_string(i) + " appears in two blocks");
            seen[i] = 1;
            s += p[i];
        }
        sums.push_back(s);
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            throw Error(ErrorCode::BadPartition,
                        "index " + std::to_string(i) + " is not covered");
    std::stable_sort(sums.begin(), sums.end(), std::greater<>());
    return ProbVec::from_sorted(std::move(sums));
}

} // namespace mec
