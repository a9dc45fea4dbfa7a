#include "mec/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mec/coupling2.hpp"
#include "mec/coupling_k.hpp"
#include "mec/lattice.hpp"
#include "mec/oracle.hpp"
#include "mec/prob_vec.hpp"

namespace mec::cli {

namespace {

using Json = nlohmann::ordered_json;

// CLI11 would expand a "[a,b]" argument into several values, so inline
// arrays are swapped for placeholders before parsing.
constexpr std::string_view kInlinePrefix = "\x01inline:";

struct RunConfig {
    std::string command;
    std::vector<std::string> inline_arrays;
    std::vector<std::string> inputs;
    std::string format = "json";
    std::string base = "bits";
    bool sorted = false;
    std::optional<double> tol_sum;
    std::optional<double> tol_zero;
    bool dense = false;
    std::size_t dense_cap = 1'000'000;
    std::size_t oracle_cap = kDefaultOracleCap;
};

// Probabilities and entropies are reported with 12 significant digits.
double sig12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    const double r = std::strtod(buf, nullptr);
    return r == 0.0 ? 0.0 : r;
}

Json number_array(std::span<const double> v) {
    Json a = Json::array();
    for (double x : v)
        a.push_back(sig12(x));
    return a;
}

Json matrix_json(const std::vector<std::vector<double>>& m) {
    Json a = Json::array();
    for (const auto& row : m)
        a.push_back(number_array(row));
    return a;
}

std::optional<double> env_double(const char* name) {
    const char* raw = std::getenv(name);
    if (raw == nullptr || *raw == '\0')
        return std::nullopt;
    double v = 0.0;
    const std::string_view s(raw);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(ErrorCode::BadTolerance, std::string(name) + " is not a number: " + raw);
    return v;
}

bool is_inline_array(const std::string& arg) {
    const auto first = arg.find_first_not_of(" \t\r\n");
    return first != std::string::npos && arg[first] == '[';
}

std::string read_source(const std::string& arg, const RunConfig& cfg, std::istream& in) {
    if (arg.starts_with(kInlinePrefix))
        return cfg.inline_arrays.at(std::stoul(arg.substr(kInlinePrefix.size())));
    if (arg == "-")
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    std::ifstream file(arg);
    if (!file)
        throw Error(ErrorCode::ParseError, "cannot read '" + arg + "'");
    return {std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>()};
}

class Runner {
public:
    Runner(const RunConfig& cfg, std::istream& in) : cfg_(cfg), in_(in) {
        if (auto v = env_double("MEC_TOLERANCE_SUM")) tol_.eps_sum = *v;
        if (auto v = env_double("MEC_TOLERANCE_ZERO")) tol_.eps_zero = *v;
        if (cfg.tol_sum) tol_.eps_sum = *cfg.tol_sum;
        if (cfg.tol_zero) tol_.eps_zero = *cfg.tol_zero;
        tol_.validate();
        unit_scale_ = cfg.base == "nats" ? std::log(2.0) : 1.0;
    }

    Json execute() {
        std::vector<ProbVec> ps;
        for (const std::string& arg : cfg_.inputs)
            ps.push_back(make_probvec(parse_distribution(read_source(arg, cfg_, in_)), tol_));

        Json out;
        out["command"] = cfg_.command;
        out["unit"] = cfg_.base;
        if (cfg_.command == "glb") glb_cmd(ps, out);
        else if (cfg_.command == "couple") couple_cmd(ps, out);
        else if (cfg_.command == "couple-k") couple_k_cmd(ps, out);
        else if (cfg_.command == "bounds") bounds_cmd(ps, out);
        else if (cfg_.command == "distance") distance_cmd(ps, out);
        else if (cfg_.command == "oracle") oracle_cmd(ps, out);
        return out;
    }

private:
    double h(double bits) const { return sig12(bits * unit_scale_); }

    void glb_cmd(const std::vector<ProbVec>& ps, Json& out) {
        const ProbVec z = glb(ps[0], ps[1], tol_).z;
        out["z"] = number_array(z.values());
        out["entropy"] = h(entropy(z));
    }

    void couple_cmd(const std::vector<ProbVec>& ps, Json& out) {
        const CouplingMatrix m = min_entropy_coupling(ps[0], ps[1], tol_);
        const double hm = m.entropy();
        const double hz = entropy(glb(ps[0], ps[1], tol_).z);
        out["order"] = cfg_.sorted ? "sorted" : "caller";
        out["rows"] = m.row_source;
        out["cols"] = m.col_source;
        out["matrix"] = matrix_json(cfg_.sorted ? m.sorted_trimmed() : m.in_caller_order());
        out["nnz"] = m.nnz(tol_.eps_zero);
        out["entropy"] = h(hm);
        out["glb_entropy"] = h(hz);
        out["gap"] = h(hm - hz);
    }

    void couple_k_cmd(const std::vector<ProbVec>& ps, Json& out) {
        const SparseJoint joint = k_min_entropy_coupling(ps, tol_);
        const double hz = entropy(glb_all(ps, tol_));
        const unsigned log_k = ceil_log2(ps.size());

        // Sorted positions, when requested, via the inverse of each marginal's
        // permutation.
        std::vector<std::vector<std::size_t>> position(ps.size());
        if (cfg_.sorted)
            for (std::size_t a = 0; a < ps.size(); ++a) {
                position[a].resize(ps[a].size());
                for (std::size_t i = 0; i < ps[a].size(); ++i)
                    position[a][ps[a].perm()[i]] = i;
            }

        out["order"] = cfg_.sorted ? "sorted" : "caller";
        out["k"] = joint.k;
        out["dims"] = joint.dims;
        Json entries = Json::array();
        for (std::size_t e = 0; e < joint.size(); ++e) {
            Json idx = Json::array();
            for (std::size_t a = 0; a < joint.k; ++a) {
                const std::size_t i = joint.index(e)[a];
                idx.push_back(cfg_.sorted ? position[a][i] : i);
            }
            entries.push_back(Json{{"p", sig12(joint.values[e])}, {"index", idx}});
        }
        out["entries"] = std::move(entries);
        out["entropy"] = h(joint.entropy());
        out["glb_entropy"] = h(hz);
        out["log_k"] = log_k;
        out["bound"] = h(hz + log_k);
        if (cfg_.dense) {
            out["dense_shape"] = joint.dims;
            out["dense"] = number_array(densify(joint, cfg_.dense_cap));
        }
    }

    void bounds_cmd(const std::vector<ProbVec>& ps, Json& out) {
        const BoundsReport b = bounds(ps[0], ps[1], tol_);
        out["h_p"] = h(b.h_p);
        out["h_q"] = h(b.h_q);
        out["h_glb"] = h(b.h_glb);
        out["mi_upper_improved"] = h(b.mi_upper_improved);
        out["mi_upper_classic"] = h(b.mi_upper_classic);
        out["joint_lower_classic"] = h(b.joint_lower_classic);
    }

    void distance_cmd(const std::vector<ProbVec>& ps, Json& out) {
        const DistanceInterval d = distance_interval(ps[0], ps[1], tol_);
        out["lower"] = h(d.lower);
        out["upper"] = h(d.upper);
        out["estimate"] = h(d.estimate);
    }

    void oracle_cmd(const std::vector<ProbVec>& ps, Json& out) {
        const ProbVec& p = ps[0];
        const ProbVec& q = ps[1];
        const auto vertices = enumerate_vertices(p, q, tol_, Execution::parallel, cfg_.oracle_cap);
        const auto best = std::min_element(
            vertices.begin(), vertices.end(),
            [](const VertexCoupling& a, const VertexCoupling& b) { return a.entropy() < b.entropy(); });
        const VertexCoupling& v = *best;
        std::vector<std::vector<double>> m(p.source_size(), std::vector<double>(q.source_size(), 0.0));
        for (std::size_t i = 0; i < v.rows; ++i)
            for (std::size_t j = 0; j < v.cols; ++j) {
                const std::size_t r = cfg_.sorted ? i : p.perm()[i];
                const std::size_t c = cfg_.sorted ? j : q.perm()[j];
                m[r][c] = v.at(i, j);
            }
        out["order"] = cfg_.sorted ? "sorted" : "caller";
        out["opt"] = h(v.entropy());
        out["vertices"] = vertices.size();
        out["support_size"] = v.support_size;
        out["argmin"] = matrix_json(m);
    }

    const RunConfig& cfg_;
    std::istream& in_;
    Tolerances tol_;
    double unit_scale_ = 1.0;
};

void render_text(const Json& j, std::ostream& out) {
    for (const auto& [key, value] : j.items()) {
        out << key << ':';
        if (value.is_array() && !value.empty() && value.front().is_array()) {
            out << '\n';
            for (const auto& row : value) {
                for (std::size_t c = 0; c < row.size(); ++c)
                    out << (c ? " " : "  ") << row[c].dump();
                out << '\n';
            }
        } else if (value.is_array() && !value.empty() && value.front().is_object()) {
            out << '\n';
            for (const auto& entry : value) {
                out << ' ';
                for (const auto& [k2, v2] : entry.items())
                    out << ' ' << k2 << '=' << v2.dump();
                out << '\n';
            }
        } else if (value.is_array()) {
            for (const auto& x : value)
                out << ' ' << x.dump();
            out << '\n';
        } else if (value.is_string()) {
            out << ' ' << value.get<std::string>() << '\n';
        } else {
            out << ' ' << value.dump() << '\n';
        }
    }
}

void report_error(const RunConfig& cfg, std::string_view code, const std::string& message,
                  std::ostream& err) {
    if (cfg.format == "json") {
        Json e{{"error", {{"code", code}, {"message", message}}}};
        err << e.dump() << '\n';
    } else {
        err << "error [" << code << "]: " << message << '\n';
    }
}

} // namespace

std::vector<double> parse_distribution(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        throw Error(ErrorCode::Empty, "distribution input is empty");

    std::vector<double> values;
    if (text[first] == '[') {
        Json doc;
        try {
            doc = Json::parse(text);
        } catch (const Json::exception& e) {
            throw Error(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
        }
        if (!doc.is_array())
            throw Error(ErrorCode::ParseError, "expected a JSON array of numbers");
        for (const auto& v : doc) {
            if (!v.is_number())
                throw Error(ErrorCode::ParseError, "array element " + v.dump() + " is not a number");
            values.push_back(v.get<double>());
        }
        return values;
    }

    std::size_t pos = first;
    while (pos < text.size()) {
        const auto start = text.find_first_not_of(" \t\r\n,", pos);
        if (start == std::string_view::npos)
            break;
        auto end = text.find_first_of(" \t\r\n,", start);
        if (end == std::string_view::npos)
            end = text.size();
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data() + start, text.data() + end, v);
        if (ec != std::errc{} || ptr != text.data() + end)
            throw Error(ErrorCode::ParseError,
                        "'" + std::string(text.substr(start, end - start)) + "' is not a number");
        values.push_back(v);
        pos = end;
    }
    return values;
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Minimum-entropy couplings, majorization bounds and exact small-instance optima"};
    app.name("mec");
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"json", "text"}));
    app.add_option("--base", cfg.base, "Entropy unit for reported values")
        ->check(CLI::IsMember({"bits", "nats"}));
    app.add_flag("--sorted", cfg.sorted, "Report in sorted (non-increasing) index order");
    app.add_option("--tol-sum", cfg.tol_sum, "Max deviation of total mass from 1 (env MEC_TOLERANCE_SUM)");
    app.add_option("--tol-zero", cfg.tol_zero, "Residuals below this are zero (env MEC_TOLERANCE_ZERO)");

    auto pair_command = [&](const char* name, const char* help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("P", cfg.inputs, "Distribution files (JSON array or decimals), '-' or inline [..]")
            ->expected(2)
            ->required();
        return sub;
    };
    pair_command("glb", "Greatest lower bound p ∧ q and its entropy");
    pair_command("couple", "Coupling within 1 bit of the minimum joint entropy");
    pair_command("bounds", "Joint-entropy and mutual-information bounds");
    pair_command("distance", "Certified interval for 2W(p,q) - H(p) - H(q)");
    CLI::App* oracle = pair_command("oracle", "Exact minimum coupling entropy (small instances)");
    oracle->add_option("--cap", cfg.oracle_cap, "Max nonzero components of p and q together");
    CLI::App* couple_k = app.add_subcommand("couple-k", "Joint of k marginals within ceil(log2 k) bits");
    couple_k->add_option("P", cfg.inputs, "Two or more distributions")->required()->expected(1, -1);
    couple_k->add_flag("--dense", cfg.dense, "Also emit the dense tensor");
    couple_k->add_option("--dense-cap", cfg.dense_cap, "Max cells of the dense tensor");

    try {
        std::vector<std::string> reversed;
        for (auto it = args.rbegin(); it != args.rend(); ++it) {
            if (is_inline_array(*it)) {
                reversed.push_back(std::string(kInlinePrefix) +
                                   std::to_string(cfg.inline_arrays.size()));
                cfg.inline_arrays.push_back(*it);
            } else {
                reversed.push_back(*it);
            }
        }
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        Runner runner(cfg, in);
        const Json result = runner.execute();
        if (cfg.format == "json")
            out << result.dump(2) << '\n';
        else
            render_text(result, out);
        return kExitOk;
    } catch (const Error& e) {
        report_error(cfg, code_name(e.code()), e.what(), err);
        return e.code() == ErrorCode::BadTolerance ? kExitUsage : kExitValidation;
    }
}

} // namespace mec::cli
