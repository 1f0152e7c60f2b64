#include "star/settings.hpp"

#include <ostream>
#include <sstream>

namespace star {

const std::vector<SettingSpec>& setting_registry()
{
    static const std::vector<SettingSpec> registry = {
        {"data", "", "dataset CSV to read"},
        {"test", "", "held-out dataset CSV"},
        {"model", "", "model file to read or write"},
        {"out", "", "output path (stdout when empty)"},
        {"replications_out", "", "per-replication benchmark CSV"},
        {"seed", "1", "simulation, fold and benchmark master seed"},
        {"design", "general", "low_rank, general, three_way_case1 or three_way_case2"},
        {"n", "400", "simulated sample size"},
        {"p1", "20", "first-way dimension"},
        {"p2", "0", "second-way dimension (0: design default)"},
        {"p3", "0", "third-way dimension (0: design default)"},
        {"sigma", "0.1", "noise standard deviation"},
        {"low", "0", "lower end of the covariate range"},
        {"high", "1", "upper end of the covariate range"},
        {"basis", "natural", "natural, bspline or identity"},
        {"order", "4", "spline order"},
        {"knots", "4", "number of internal knots"},
        {"knot_placement", "uniform", "uniform or quantile"},
        {"drop_constant", "true", "natural basis without the constant direction"},
        {"rank", "2", "CP rank"},
        {"lambda", "0", "group-lasso penalty"},
        {"max_sweeps", "200", "alternating sweeps cap"},
        {"tol", "1e-5", "sweep stopping tolerance"},
        {"inner_tol", "1e-8", "block solver KKT tolerance"},
        {"inner_max_iter", "10000", "block solver iteration cap"},
        {"ridge_strength", "0.01", "initialization ridge strength"},
        {"ridge_sweeps", "3", "initialization ridge sweeps"},
        {"fit_seed", "1", "initialization seed"},
        {"rebalance", "false", "rank rebalancing between sweeps"},
        {"sweep_order", "gauss_seidel", "gauss_seidel or jacobi"},
        {"path_start", "cold", "path start point: cold, warm or best"},
        {"ranks", "1,2,3", "rank grid"},
        {"lambdas", "", "penalty grid (empty: log grid below lambda_max)"},
        {"lambda_points", "10", "default grid size"},
        {"lambda_ratio", "0.001", "smallest grid penalty relative to lambda_max"},
        {"folds", "5", "cross-validation folds"},
        {"workers", "1", "concurrent tasks"},
        {"settings", "400:20:0.1", "benchmark rows n:p1:sigma, comma separated"},
        {"replications", "20", "benchmark replications"},
        {"test_n", "2000", "benchmark test-set size"},
        {"methods", "STAR,TLR", "benchmark methods"},
        {"delta", "1", "sensitivity increment in raw units"},
        {"group_by", "", "sensitivity ways, 1-based (empty: all)"},
    };
    return registry;
}

namespace {

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first == std::string::npos) continue;
        out.push_back(item.substr(first, last - first + 1));
    }
    return out;
}

template <class F>
auto parse_as(const std::string& key, F&& f)
{
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

} // namespace

Settings::Settings()
{
    for (const auto& s : setting_registry()) values_[s.key] = s.default_value;
}

void Settings::merge(const KeyValues& values)
{
    for (const auto& [k, v] : values) set(k, v);
}

void Settings::set(const std::string& key, const std::string& value)
{
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
    it->second = value;
}

const std::string& Settings::get(const std::string& key) const
{
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
    return it->second;
}

double Settings::number(const std::string& key) const { return parse_double(get(key), key); }

long long Settings::integer(const std::string& key) const { return parse_int(get(key), key); }

std::size_t Settings::count(const std::string& key) const
{
    const auto v = integer(key);
    if (v < 0) throw ConfigError(key + ": must be non-negative");
    return static_cast<std::size_t>(v);
}

bool Settings::flag(const std::string& key) const { return parse_bool(get(key), key); }

std::vector<double> Settings::numbers(const std::string& key) const
{
    std::vector<double> out;
    for (const auto& item : split_list(get(key))) out.push_back(parse_double(item, key));
    return out;
}

std::vector<std::size_t> Settings::counts(const std::string& key) const
{
    std::vector<std::size_t> out;
    for (const auto& item : split_list(get(key))) {
        const auto v = parse_int(item, key);
        if (v < 0) throw ConfigError(key + ": must be non-negative");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

BasisConfig Settings::basis() const
{
    BasisConfig b;
    b.kind = parse_as("basis", [&] { return parse_basis_kind(get("basis")); });
    b.order = static_cast<int>(integer("order"));
    b.n_internal = static_cast<int>(integer("knots"));
    b.drop_constant = flag("drop_constant");
    const auto& placement = get("knot_placement");
    if (placement == "uniform") {
        b.knots = KnotPlacement::uniform;
    } else if (placement == "quantile") {
        b.knots = KnotPlacement::quantile;
    } else {
        throw ConfigError("knot_placement: expected uniform or quantile, got '" + placement + "'");
    }
    return b;
}

FitConfig Settings::fit() const
{
    FitConfig f;
    f.rank = count("rank");
    f.lambda = number("lambda");
    f.max_sweeps = static_cast<int>(integer("max_sweeps"));
    f.tol = number("tol");
    f.inner_tol = number("inner_tol");
    f.inner_max_iter = static_cast<int>(integer("inner_max_iter"));
    f.ridge_strength = number("ridge_strength");
    f.ridge_sweeps = static_cast<int>(integer("ridge_sweeps"));
    f.seed = static_cast<std::uint64_t>(integer("fit_seed"));
    f.rebalance = flag("rebalance");
    const auto& order = get("sweep_order");
    if (order == "gauss_seidel") {
        f.order = SweepOrder::gauss_seidel;
    } else if (order == "jacobi") {
        f.order = SweepOrder::jacobi;
    } else {
        throw ConfigError("sweep_order: expected gauss_seidel or jacobi, got '" + order + "'");
    }
    const auto& start = get("path_start");
    if (start == "cold") {
        f.path_start = PathStart::cold;
    } else if (start == "warm") {
        f.path_start = PathStart::warm;
    } else if (start == "best") {
        f.path_start = PathStart::best;
    } else {
        throw ConfigError("path_start: expected cold, warm or best, got '" + start + "'");
    }
    return f;
}

CvConfig Settings::cv() const
{
    CvConfig c;
    c.basis = basis();
    c.fit = fit();
    c.lambdas = numbers("lambdas");
    c.ranks = counts("ranks");
    c.lambda_points = count("lambda_points");
    c.lambda_ratio = number("lambda_ratio");
    c.folds = count("folds");
    c.seed = static_cast<std::uint64_t>(integer("seed"));
    c.workers = count("workers");
    return c;
}

SimSpec Settings::sim() const
{
    SimSpec s;
    s.design = parse_as("design", [&] { return parse_design(get("design")); });
    s.n = count("n");
    s.p1 = count("p1");
    s.p2 = count("p2");
    s.p3 = count("p3");
    s.sigma = number("sigma");
    s.low = number("low");
    s.high = number("high");
    s.seed = static_cast<std::uint64_t>(integer("seed"));
    return s;
}

BenchmarkConfig Settings::benchmark() const
{
    BenchmarkConfig b;
    const auto sim_spec = sim();
    b.design = sim_spec.design;
    b.low = sim_spec.low;
    b.high = sim_spec.high;
    b.settings.clear();
    for (const auto& row : split_list(get("settings"))) {
        std::istringstream ss(row);
        std::string n, p1, sigma, extra;
        if (!std::getline(ss, n, ':') || !std::getline(ss, p1, ':') || !std::getline(ss, sigma, ':') ||
            std::getline(ss, extra, ':')) {
            throw ConfigError("settings: expected n:p1:sigma, got '" + row + "'");
        }
        BenchmarkSetting s;
        const auto nv = parse_int(n, "settings");
        const auto pv = parse_int(p1, "settings");
        if (nv <= 0 || pv <= 0) throw ConfigError("settings: n and p1 must be positive");
        s.n = static_cast<std::size_t>(nv);
        s.p1 = static_cast<std::size_t>(pv);
        s.sigma = parse_double(sigma, "settings");
        b.settings.push_back(s);
    }
    b.replications = count("replications");
    b.test_n = count("test_n");
    b.seed = static_cast<std::uint64_t>(integer("seed"));
    b.methods.clear();
    for (const auto& m : split_list(get("methods"))) {
        b.methods.push_back(parse_as("methods", [&] { return parse_method(m); }));
    }
    b.cv = cv();
    b.workers = count("workers");
    b.cv.workers = 1;
    return b;
}

SensitivityConfig Settings::sensitivity() const
{
    SensitivityConfig s;
    s.delta = number("delta");
    for (auto k : counts("group_by")) {
        if (k == 0) throw ConfigError("group_by: ways are 1-based");
        s.group_by.push_back(k - 1);
    }
    return s;
}

void Settings::print(std::ostream& out) const
{
    for (const auto& s : setting_registry()) out << s.key << " = " << values_.at(s.key) << '\n';
}

} // namespace star
