#include <gsbf/harness/spec.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include <gsbf/errors.hpp>

namespace gsbf::harness {

namespace {

constexpr std::array kKnownKeys{
    "L", "K", "N", "region_half_width_m",
    "pathloss.model", "pathloss.exponent", "pathloss.reference_distance_m", "pathloss.reference_gain",
    "pathloss.matrix", "per_trial_topology",
    "pc_watts", "zeta", "nu", "sigma2", "sinr_db",
    "p", "epsilon", "max_iters", "obj_tol", "trials", "base_seed", "algorithms", "selection_mode",
};

struct Entry
{
    std::string value;
    int line = 0;
};

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

class Reader
{
public:
    Reader(std::map<std::string, Entry> entries, std::string origin)
        : entries_(std::move(entries)), origin_(std::move(origin)) {}

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const
    {
        const auto it = entries_.find(key);
        std::string where = origin_;
        if (it != entries_.end()) where += ":" + std::to_string(it->second.line);
        throw ConfigError(where + ": key '" + key + "': " + what);
    }

    const std::string& raw(const std::string& key) const { return entries_.at(key).value; }

    double number(const std::string& key, const std::string& text) const
    {
        double x = 0.0;
        const char* first = text.data();
        const char* last = first + text.size();
        const auto [ptr, ec] = std::from_chars(first, last, x);
        if (ec != std::errc() || ptr != last || text.empty() || !std::isfinite(x))
            fail(key, "'" + text + "' is not a finite number");
        return x;
    }

    double number(const std::string& key) const { return number(key, raw(key)); }

    long long integer(const std::string& key) const
    {
        const std::string& text = raw(key);
        long long x = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
        if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
            fail(key, "'" + text + "' is not an integer");
        return x;
    }

    std::uint64_t unsigned_integer(const std::string& key) const
    {
        const std::string& text = raw(key);
        std::uint64_t x = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
        if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
            fail(key, "'" + text + "' is not a nonnegative integer");
        return x;
    }

    std::vector<double> list(const std::string& key) const
    {
        std::vector<double> out;
        for (const auto& item : split(raw(key), ',')) out.push_back(number(key, item));
        return out;
    }

    /// A scalar broadcast to `n` entries, or a list of exactly `n`.
    Eigen::VectorXd vector(const std::string& key, int n) const
    {
        const auto v = list(key);
        if (v.size() == 1) return Eigen::VectorXd::Constant(n, v[0]);
        if (static_cast<int>(v.size()) != n)
            fail(key, "expected 1 or " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
        return Eigen::Map<const Eigen::VectorXd>(v.data(), n);
    }

    bool boolean(const std::string& key) const
    {
        const auto& v = raw(key);
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        fail(key, "expected true or false, got '" + v + "'");
    }

private:
    std::map<std::string, Entry> entries_;
    std::string origin_;
};

/// "a+bl" with l the 1-based RRH index, or a plain list.
Eigen::VectorXd parse_pc(const Reader& r, int L)
{
    static const std::regex formula(R"(^\s*([0-9.eE+-]+)\s*\+\s*([0-9.eE+-]*)\s*\*?\s*l\s*$)");
    const auto& text = r.raw("pc_watts");
    std::smatch m;
    if (std::regex_match(text, m, formula)) {
        const double a = r.number("pc_watts", m[1].str());
        const double b = m[2].str().empty() ? 1.0 : r.number("pc_watts", m[2].str());
        Eigen::VectorXd pc(L);
        for (int l = 0; l < L; ++l) pc(l) = a + b * (l + 1);
        return pc;
    }
    return r.vector("pc_watts", L);
}

Eigen::MatrixXd parse_matrix(const Reader& r, int K, int L)
{
    const auto rows = split(r.raw("pathloss.matrix"), ';');
    if (static_cast<int>(rows.size()) != K) r.fail("pathloss.matrix", "expected K rows separated by ';'");
    Eigen::MatrixXd D(K, L);
    for (int k = 0; k < K; ++k) {
        const auto cols = split(rows[k], ',');
        if (static_cast<int>(cols.size()) != L) r.fail("pathloss.matrix", "expected L entries per row");
        for (int l = 0; l < L; ++l) D(k, l) = r.number("pathloss.matrix", cols[l]);
    }
    return D;
}

std::string join(const Eigen::VectorXd& v)
{
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_double(v(i));
    }
    return out;
}

} // namespace

std::string format_double(double x)
{
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc()) throw Error("failed to format number");
    return std::string(buf.data(), ptr);
}

std::string_view to_string(Algorithm a)
{
    switch (a) {
    case Algorithm::alg1: return "alg1";
    case Algorithm::alg1_p1: return "alg1-p1";
    case Algorithm::alg1_p05: return "alg1-p05";
    case Algorithm::alg2: return "alg2";
    case Algorithm::alg2_p1: return "alg2-p1";
    case Algorithm::alg2_p05: return "alg2-p05";
    case Algorithm::approx_l1l2: return "approx-l1l2";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view label)
{
    for (auto a : {Algorithm::alg1, Algorithm::alg1_p1, Algorithm::alg1_p05, Algorithm::alg2,
                   Algorithm::alg2_p1, Algorithm::alg2_p05, Algorithm::approx_l1l2})
        if (to_string(a) == label) return a;
    throw ConfigError("unknown algorithm '" + std::string(label) + "'");
}

std::string_view to_string(stages::SelectionMode m)
{
    return m == stages::SelectionMode::bisection ? "bisection" : "exhaustive-prefix";
}

double algorithm_exponent(Algorithm a, double configured_p)
{
    switch (a) {
    case Algorithm::alg1_p1:
    case Algorithm::alg2_p1:
    case Algorithm::approx_l1l2: return 1.0;
    case Algorithm::alg1_p05:
    case Algorithm::alg2_p05: return 0.5;
    default: return configured_p;
    }
}

stages::Stage1Mode algorithm_stage1(Algorithm a)
{
    switch (a) {
    case Algorithm::alg2:
    case Algorithm::alg2_p1:
    case Algorithm::alg2_p05: return stages::Stage1Mode::statistical;
    case Algorithm::approx_l1l2: return stages::Stage1Mode::l1l2_approx;
    default: return stages::Stage1Mode::instantaneous;
    }
}

void ExperimentSpec::validate() const
{
    scenario.validate();
    params.validate();
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (sinr_grid_db.empty()) throw ConfigError("sinr_db grid must be nonempty");
    if (algorithms.empty()) throw ConfigError("algorithms must be nonempty");
    for (double s : sinr_grid_db)
        if (!std::isfinite(s)) throw ConfigError("sinr_db entries must be finite");
    if (scenario.pathloss.model == PathlossModel::log_distance && !(scenario.region_half_width > 0.0))
        throw ConfigError("region_half_width_m must be > 0 for the log-distance model");
}

ExperimentSpec parse_spec(std::string_view text, std::string_view origin)
{
    std::map<std::string, Entry> entries;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    const std::string where(origin);
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
            throw ConfigError(where + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (value.empty())
            throw ConfigError(where + ":" + std::to_string(lineno) + ": key '" + key + "' has no value");
        if (!entries.emplace(key, Entry{value, lineno}).second)
            throw ConfigError(where + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }

    const Reader r(std::move(entries), where);
    for (const char* key : {"L", "K", "N", "sinr_db"})
        if (!r.has(key)) throw ConfigError(where + ": missing required key '" + std::string(key) + "'");

    const auto L = r.integer("L");
    const auto K = r.integer("K");
    const auto N = r.integer("N");
    if (L < 1 || L > 4096) r.fail("L", "must lie in [1, 4096]");
    if (K < 1 || K > 4096) r.fail("K", "must lie in [1, 4096]");
    if (N < 1 || N > 4096) r.fail("N", "must lie in [1, 4096]");

    ExperimentSpec spec;
    const double w = r.has("region_half_width_m") ? r.number("region_half_width_m") : 1000.0;
    auto& sc = spec.scenario;
    sc = NetworkConfig::with_defaults(static_cast<int>(L), static_cast<int>(K), static_cast<int>(N), w);

    auto& pl = sc.pathloss;
    if (r.has("pathloss.model")) {
        const auto& m = r.raw("pathloss.model");
        if (m == "log-distance")
            pl.model = PathlossModel::log_distance;
        else if (m == "fixed-matrix")
            pl.model = PathlossModel::fixed_matrix;
        else
            r.fail("pathloss.model", "expected log-distance or fixed-matrix, got '" + m + "'");
    }
    if (r.has("pathloss.exponent")) pl.exponent = r.number("pathloss.exponent");
    if (r.has("pathloss.reference_distance_m")) pl.reference_distance = r.number("pathloss.reference_distance_m");
    pl.reference_gain = r.has("pathloss.reference_gain")
                            ? r.number("pathloss.reference_gain")
                            : default_reference_gain(w, pl.exponent, pl.reference_distance);
    if (r.has("pathloss.matrix")) {
        if (pl.model != PathlossModel::fixed_matrix)
            r.fail("pathloss.matrix", "only valid with pathloss.model = fixed-matrix");
        pl.fixed = parse_matrix(r, sc.K, sc.L);
    }

    if (r.has("pc_watts")) sc.pc = parse_pc(r, sc.L);
    if (r.has("zeta")) sc.zeta = r.vector("zeta", sc.L);
    if (r.has("nu")) sc.nu = r.vector("nu", sc.L);
    if (r.has("sigma2")) sc.sigma2 = r.vector("sigma2", sc.K);
    spec.sinr_grid_db = r.list("sinr_db");
    sc.gamma = Eigen::VectorXd::Constant(sc.K, std::pow(10.0, spec.sinr_grid_db.front() / 10.0));

    if (r.has("p")) spec.params.p = r.number("p");
    if (r.has("epsilon")) spec.params.epsilon = r.number("epsilon");
    if (r.has("max_iters")) {
        const auto m = r.integer("max_iters");
        if (m < 1 || m > 1000000) r.fail("max_iters", "must lie in [1, 1000000]");
        spec.params.max_iters = static_cast<int>(m);
    }
    if (r.has("obj_tol")) spec.params.obj_tol = r.number("obj_tol");
    if (r.has("trials")) {
        const auto t = r.integer("trials");
        if (t < 1 || t > 100000000) r.fail("trials", "must be >= 1");
        spec.trials = static_cast<int>(t);
    }
    if (r.has("base_seed")) spec.base_seed = r.unsigned_integer("base_seed");
    if (r.has("per_trial_topology")) spec.per_trial_topology = r.boolean("per_trial_topology");
    if (r.has("algorithms")) {
        spec.algorithms.clear();
        for (const auto& label : split(r.raw("algorithms"), ',')) {
            try {
                const auto a = parse_algorithm(label);
                if (std::find(spec.algorithms.begin(), spec.algorithms.end(), a) != spec.algorithms.end())
                    r.fail("algorithms", "duplicate algorithm '" + label + "'");
                spec.algorithms.push_back(a);
            } catch (const ConfigError& e) {
                if (std::string_view(e.what()).rfind("unknown", 0) == 0) r.fail("algorithms", e.what());
                throw;
            }
        }
    }
    if (r.has("selection_mode")) {
        const auto& m = r.raw("selection_mode");
        if (m == "bisection")
            spec.selection = stages::SelectionMode::bisection;
        else if (m == "exhaustive-prefix")
            spec.selection = stages::SelectionMode::exhaustive_prefix;
        else
            r.fail("selection_mode", "expected bisection or exhaustive-prefix, got '" + m + "'");
    }

    try {
        spec.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return spec;
}

ExperimentSpec load_spec(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_spec(ss.str(), path);
}

std::string echo_spec(const ExperimentSpec& spec)
{
    const auto& sc = spec.scenario;
    std::ostringstream out;
    out << "L = " << sc.L << "\n"
        << "K = " << sc.K << "\n"
        << "N = " << sc.N << "\n"
        << "region_half_width_m = " << format_double(sc.region_half_width) << "\n"
        << "pathloss.model = "
        << (sc.pathloss.model == PathlossModel::log_distance ? "log-distance" : "fixed-matrix") << "\n"
        << "pathloss.exponent = " << format_double(sc.pathloss.exponent) << "\n"
        << "pathloss.reference_distance_m = " << format_double(sc.pathloss.reference_distance) << "\n"
        << "pathloss.reference_gain = " << format_double(sc.pathloss.reference_gain) << "\n";
    if (sc.pathloss.model == PathlossModel::fixed_matrix) {
        out << "pathloss.matrix = ";
        for (Eigen::Index k = 0; k < sc.pathloss.fixed.rows(); ++k) {
            if (k) out << "; ";
            out << join(sc.pathloss.fixed.row(k).transpose());
        }
        out << "\n";
    }
    out << "per_trial_topology = " << (spec.per_trial_topology ? "true" : "false") << "\n"
        << "pc_watts = " << join(sc.pc) << "\n"
        << "zeta = " << join(sc.zeta) << "\n"
        << "nu = " << join(sc.nu) << "\n"
        << "sigma2 = " << join(sc.sigma2) << "\n"
        << "sinr_db = "
        << join(Eigen::Map<const Eigen::VectorXd>(spec.sinr_grid_db.data(),
                                                  static_cast<Eigen::Index>(spec.sinr_grid_db.size())))
        << "\n"
        << "p = " << format_double(spec.params.p) << "\n"
        << "epsilon = " << format_double(spec.params.epsilon) << "\n"
        << "max_iters = " << spec.params.max_iters << "\n"
        << "obj_tol = " << format_double(spec.params.obj_tol) << "\n"
        << "trials = " << spec.trials << "\n"
        << "base_seed = " << spec.base_seed << "\n"
        << "algorithms = ";
    for (std::size_t i = 0; i < spec.algorithms.size(); ++i)
        out << (i ? ", " : "") << to_string(spec.algorithms[i]);
    out << "\n"
        << "selection_mode = " << to_string(spec.selection) << "\n";
    return out.str();
}

} // namespace gsbf::harness
