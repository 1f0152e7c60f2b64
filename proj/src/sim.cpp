#include "star/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace star {

std::string to_string(Design design)
{
    switch (design) {
    case Design::low_rank: return "low_rank";
    case Design::general: return "general";
    case Design::three_way_case1: return "three_way_case1";
    case Design::three_way_case2: return "three_way_case2";
    case Design::linear: return "linear";
    }
    return "unknown";
}

Design parse_design(const std::string& name)
{
    if (name == "low_rank") return Design::low_rank;
    if (name == "general") return Design::general;
    if (name == "three_way_case1") return Design::three_way_case1;
    if (name == "three_way_case2") return Design::three_way_case2;
    if (name == "linear") return Design::linear;
    throw std::invalid_argument("unknown design '" + name + "'");
}

namespace {

bool three_way(Design d) { return d == Design::three_way_case1 || d == Design::three_way_case2; }

constexpr std::size_t kFirstActive = 10;
constexpr std::size_t kSecondActive = 4;
constexpr std::size_t kThirdActive = 2;
constexpr double kLogFloor = 1e-12;

double safe_log_abs(double v) { return std::log(std::max(std::abs(v), kLogFloor)); }

} // namespace

Shape SimSpec::shape() const
{
    if (three_way(design)) return {p1, p2 == 0 ? 10 : p2, p3 == 0 ? 2 : p3};
    return {p1, p2 == 0 ? 8 : p2};
}

void SimSpec::validate() const
{
    const auto s = shape();
    if (n == 0) throw std::invalid_argument("SimSpec: n must be positive");
    if (s[0] < kFirstActive || s[1] < kSecondActive || (s.size() == 3 && s[2] < kThirdActive)) {
        throw std::invalid_argument("SimSpec: dimensions smaller than the number of important features");
    }
    if (!(sigma >= 0.0)) throw std::invalid_argument("SimSpec: sigma must be non-negative");
    if (!(high > low)) throw std::invalid_argument("SimSpec: empty covariate range");
}

std::vector<std::size_t> important_counts(Design design)
{
    if (three_way(design)) return {kFirstActive, kSecondActive, kThirdActive};
    return {kFirstActive, kSecondActive};
}

double normal_pdf(double x, double mean, double sd)
{
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

std::function<double(double)> component_functions(std::size_t j, std::size_t k)
{
    if (j == 0 || k == 0) throw std::invalid_argument("component_functions: indices are 1-based");
    const bool j_odd = j % 2 == 1;
    const bool k_odd = k % 2 == 1;
    if (j_odd && k_odd) return [](double x) { return -std::sin(1.5 * x); };
    if (!j_odd && k_odd) return [](double x) { return x * x * x + 1.5 * (x - 0.5) * (x - 0.5); };
    if (j_odd && !k_odd) return [](double x) { return -normal_pdf(x, 0.5, 0.8); };
    return [](double x) { return std::sin(std::exp(-0.5 * x)); };
}

double first_way_function(std::size_t j, double x)
{
    if (j == 0) throw std::invalid_argument("first_way_function: index is 1-based");
    return j % 2 == 1 ? -std::sin(1.5 * x) : x * x * x + 1.5 * (x - 0.5) * (x - 0.5);
}

double second_way_function(std::size_t k, double x)
{
    if (k == 0) throw std::invalid_argument("second_way_function: index is 1-based");
    return k % 2 == 1 ? -normal_pdf(x, 0.5, 0.8) : std::sin(std::exp(-0.5 * x));
}

double low_rank_function(std::span<const double> factor1, std::span<const double> factor2)
{
    if (factor1.size() < kFirstActive || factor2.size() < kSecondActive) {
        throw DataError("low_rank_function: factors shorter than the important features");
    }
    double total = 0.0;
    for (std::size_t j = 1; j <= kFirstActive; ++j) {
        const double a = first_way_function(j, factor1[j - 1]);
        for (std::size_t k = 1; k <= kSecondActive; ++k) {
            total += a * second_way_function(k, factor2[k - 1]);
        }
    }
    return total;
}

double true_function(const SimSpec& spec, const DenseTensor& x)
{
    if (x.shape() != spec.shape()) throw DataError("true_function: covariate shape mismatch");
    switch (spec.design) {
    case Design::low_rank:
        throw std::invalid_argument(
            "true_function: the low-rank response depends on the rank-1 factors; use low_rank_function");
    case Design::linear: {
        double total = 0.0;
        for (std::size_t j = 0; j < kFirstActive; ++j) {
            for (std::size_t k = 0; k < kSecondActive; ++k) total += x.at({j, k});
        }
        return total;
    }
    case Design::general: {
        double total = 0.0;
        for (std::size_t j = 1; j <= kFirstActive; ++j) {
            for (std::size_t k = 1; k <= kSecondActive; ++k) {
                total += component_functions(j, k)(x.at({j - 1, k - 1}));
            }
        }
        return total;
    }
    case Design::three_way_case1: {
        double total = 0.0;
        for (std::size_t j = 1; j <= kFirstActive; ++j) {
            for (std::size_t k = 1; k <= kSecondActive; ++k) {
                const auto f = component_functions(j, k);
                total += std::sin(f(x.at({j - 1, k - 1, 0}))) + safe_log_abs(f(x.at({j - 1, k - 1, 1})));
            }
        }
        return total;
    }
    case Design::three_way_case2: {
        double s = 0.0;
        for (std::size_t j = 1; j <= kFirstActive; ++j) {
            for (std::size_t k = 1; k <= kSecondActive; ++k) {
                const auto f = component_functions(j, k);
                for (std::size_t l = 0; l < kThirdActive; ++l) s += f(x.at({j - 1, k - 1, l}));
            }
        }
        return std::sin(s) + safe_log_abs(s);
    }
    }
    return 0.0;
}

SimOutput simulate(const SimSpec& spec)
{
    spec.validate();
    const Shape shape = spec.shape();
    const std::size_t P = shape_size(shape);
    const auto n = static_cast<Eigen::Index>(spec.n);

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> uniform(spec.low, spec.high);
    std::normal_distribution<double> normal(0.0, 1.0);

    SimOutput out;
    out.data.shape = shape;
    out.data.x.resize(n, static_cast<Eigen::Index>(P));
    out.data.y.resize(n);
    out.noiseless.resize(n);

    if (spec.design == Design::low_rank) {
        out.factor1.resize(n, static_cast<Eigen::Index>(shape[0]));
        out.factor2.resize(n, static_cast<Eigen::Index>(shape[1]));
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index a = 0; a < out.factor1.cols(); ++a) out.factor1(i, a) = uniform(rng);
            for (Eigen::Index b = 0; b < out.factor2.cols(); ++b) out.factor2(i, b) = uniform(rng);
            for (Eigen::Index a = 0; a < out.factor1.cols(); ++a) {
                for (Eigen::Index b = 0; b < out.factor2.cols(); ++b) {
                    out.data.x(i, a * out.factor2.cols() + b) = out.factor1(i, a) * out.factor2(i, b);
                }
            }
            out.noiseless[i] = low_rank_function(
                std::span<const double>(out.factor1.row(i).data(), static_cast<std::size_t>(out.factor1.cols())),
                std::span<const double>(out.factor2.row(i).data(), static_cast<std::size_t>(out.factor2.cols())));
        }
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index pos = 0; pos < static_cast<Eigen::Index>(P); ++pos) {
                out.data.x(i, pos) = uniform(rng);
            }
            out.noiseless[i] = true_function(spec, out.data.sample(static_cast<std::size_t>(i)));
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        out.data.y[i] = out.noiseless[i] + spec.sigma * normal(rng);
    }

    const auto counts = important_counts(spec.design);
    for (auto c : counts) {
        std::vector<std::size_t> active(c);
        for (std::size_t j = 0; j < c; ++j) active[j] = j;
        out.active_sets.push_back(std::move(active));
    }
    return out;
}

} // namespace star
