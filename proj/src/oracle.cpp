#include "mec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>

namespace mec {

namespace {

using Key = std::vector<long long>;

Key rounded_key(const std::vector<double>& m) {
    Key key(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        key[i] = std::llround(m[i] * 1e12);
    return key;
}

std::size_t support(const ProbVec& p, double eps_zero) {
    std::size_t s = 0;
    for (double v : p.values())
        if (v > eps_zero)
            ++s;
    return s;
}

class VertexSearch {
public:
    VertexSearch(const ProbVec& p, const ProbVec& q, const Tolerances& tol)
        : rows_(support(p, tol.eps_zero)), cols_(support(q, tol.eps_zero)), tol_(tol),
          row_left_(p.values().begin(), p.values().begin() + rows_),
          col_left_(q.values().begin(), q.values().begin() + cols_),
          row_live_(rows_, 1), col_live_(cols_, 1), cells_(rows_ * cols_, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    void assign(std::size_t i, std::size_t j) {
        const double v = std::min(row_left_[i], col_left_[j]);
        cells_[i * cols_ + j] = v;
        row_left_[i] -= v;
        col_left_[j] -= v;
        if (row_left_[i] <= tol_.eps_zero) {
            row_left_[i] = 0.0;
            row_live_[i] = 0;
        }
        if (col_left_[j] <= tol_.eps_zero) {
            col_left_[j] = 0.0;
            col_live_[j] = 0;
        }
    }

    void run() {
        if (!visited_.insert(rounded_key(cells_)).second)
            return;
        const bool rows_done = std::none_of(row_live_.begin(), row_live_.end(),
                                            [](char c) { return c != 0; });
        const bool cols_done = std::none_of(col_live_.begin(), col_live_.end(),
                                            [](char c) { return c != 0; });
        if (rows_done || cols_done) {
            record();
            return;
        }
        for (std::size_t i = 0; i < rows_; ++i) {
            if (!row_live_[i])
                continue;
            for (std::size_t j = 0; j < cols_; ++j) {
                if (!col_live_[j])
                    continue;
                const auto saved_row = row_left_[i];
                const auto saved_col = col_left_[j];
                assign(i, j);
                run();
                cells_[i * cols_ + j] = 0.0;
                row_left_[i] = saved_row;
                col_left_[j] = saved_col;
                row_live_[i] = 1;
                col_live_[j] = 1;
            }
        }
    }

    std::map<Key, std::vector<double>>& found() { return found_; }

private:
    void record() {
        for (double r : row_left_)
            if (r > tol_.eps_sum)
                throw Error(ErrorCode::InternalInvariant, "vertex search left row mass");
        for (double c : col_left_)
            if (c > tol_.eps_sum)
                throw Error(ErrorCode::InternalInvariant, "vertex search left column mass");
        found_.try_emplace(rounded_key(cells_), cells_);
    }

    std::size_t rows_;
    std::size_t cols_;
    Tolerances tol_;
    std::vector<double> row_left_;
    std::vector<double> col_left_;
    std::vector<char> row_live_;
    std::vector<char> col_live_;
    std::vector<double> cells_;
    std::set<Key> visited_;
    std::map<Key, std::vector<double>> found_;
};

} // namespace

std::vector<VertexCoupling> enumerate_vertices(const ProbVec& p, const ProbVec& q,
                                               const Tolerances& tol, Execution exec,
                                               std::size_t cap) {
    tol.validate();
    const std::size_t sp = support(p, tol.eps_zero);
    const std::size_t sq = support(q, tol.eps_zero);
    if (sp + sq > cap)
        throw Error(ErrorCode::InstanceTooLarge,
                    "oracle supports " + std::to_string(cap) + " nonzero components in total, got " +
                        std::to_string(sp + sq));

    std::map<Key, std::vector<double>> found;
    if (exec == Execution::serial) {
        VertexSearch search(p, q, tol);
        search.run();
        found = std::move(search.found());
    } else {
        const std::ptrdiff_t first_cells = static_cast<std::ptrdiff_t>(sp * sq);
        std::vector<std::map<Key, std::vector<double>>> partial(sp * sq);
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t c = 0; c < first_cells; ++c) {
            try {
                VertexSearch search(p, q, tol);
                search.assign(static_cast<std::size_t>(c) / sq, static_cast<std::size_t>(c) % sq);
                search.run();
                partial[c] = std::move(search.found());
            } catch (...) {
#pragma omp critical(mec_oracle_failure)
                if (!failure)
                    failure = std::current_exception();
            }
        }
        if (failure)
            std::rethrow_exception(failure);
        for (auto& part : partial)
            found.merge(part);
    }

    std::vector<VertexCoupling> out;
    out.reserve(found.size());
    for (auto& [key, cells] : found) {
        VertexCoupling v;
        v.rows = p.size();
        v.cols = q.size();
        v.m.assign(v.rows * v.cols, 0.0);
        for (std::size_t i = 0; i < sp; ++i)
            for (std::size_t j = 0; j < sq; ++j)
                v.m[i * v.cols + j] = cells[i * sq + j];
        v.support_size = static_cast<std::size_t>(std::count_if(
            v.m.begin(), v.m.end(), [&](double x) { return x > tol.eps_zero; }));
        out.push_back(std::move(v));
    }
    return out;
}

ExactResult exact_min_entropy(const ProbVec& p, const ProbVec& q, const Tolerances& tol,
                              Execution exec, std::size_t cap) {
    std::vector<VertexCoupling> vertices = enumerate_vertices(p, q, tol, exec, cap);
    ExactResult best;
    best.opt_value = std::numeric_limits<double>::infinity();
    for (VertexCoupling& v : vertices) {
        const double h = v.entropy();
        if (h < best.opt_value) {
            best.opt_value = h;
            best.argmin = std::move(v);
        }
    }
    return best;
}

} // namespace mec
