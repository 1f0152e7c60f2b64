#include "star/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "star/baselines.hpp"
#include "star/io.hpp"
#include "star/model.hpp"

namespace star {

std::string to_string(Method method)
{
    return method == Method::star ? "STAR" : "TLR";
}

Method parse_method(const std::string& name)
{
    if (name == "STAR" || name == "star") return Method::star;
    if (name == "TLR" || name == "tlr") return Method::tlr;
    throw std::invalid_argument("unknown method '" + name + "'");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream)
{
    std::uint64_t z = master + (stream + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double median(std::vector<double> values)
{
    if (values.empty()) throw std::invalid_argument("median: empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double median_standard_error(const std::vector<double>& values)
{
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    return 1.2533 * sd / std::sqrt(static_cast<double>(n));
}

ReplicationData replication_data(const BenchmarkConfig& config, std::size_t setting, std::size_t replication)
{
    const auto& s = config.settings.at(setting);
    SimSpec spec;
    spec.design = config.design;
    spec.n = s.n;
    spec.p1 = s.p1;
    spec.sigma = s.sigma;
    spec.low = config.low;
    spec.high = config.high;
    ReplicationData out;
    spec.seed = derive_seed(config.seed, 3 * replication);
    out.train = simulate(spec);
    spec.n = config.test_n;
    spec.seed = derive_seed(config.seed, 3 * replication + 1);
    out.test = simulate(spec);
    out.cv_seed = derive_seed(config.seed, 3 * replication + 2);
    return out;
}

ReplicationResult run_replication(const BenchmarkConfig& config, std::size_t setting, std::size_t replication,
                                  Method method)
{
    const auto start = std::chrono::steady_clock::now();
    const auto data = replication_data(config, setting, replication);

    CvConfig cv = config.cv;
    cv.seed = data.cv_seed;
    cv.workers = 1;
    cv.scaler_observer = nullptr;
    if (method == Method::tlr) cv.basis = tlr_basis();
    const auto report = cross_validate(data.train.data, cv);
    const auto& best = report.best();

    // Refit on all training data along the same grid down to the selected penalty.
    FitConfig fc = cv.fit;
    fc.rank = best.rank;
    const auto featurized = featurize_training(data.train.data, cv.basis);
    std::vector<double> path;
    if (fc.path_start == PathStart::cold) {
        path.push_back(best.lambda);
    } else {
        for (double l : lambda_grid(data.train.data, cv, best.rank)) {
            if (l >= best.lambda) path.push_back(l);
        }
    }
    auto fits = fit_path(featurized, fc, path);
    const auto model = make_model(featurized, std::move(fits.back()));

    ReplicationResult out;
    out.setting = setting;
    out.replication = replication;
    out.method = method;
    out.test_mse = mse(predict(model, data.test.data), data.test.data.y);
    out.lambda = best.lambda;
    out.rank = best.rank;
    out.converged = report.all_converged && model.fit.converged;
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config,
                              const std::function<void(const ReplicationResult&)>& progress)
{
    if (config.replications == 0) throw std::invalid_argument("benchmark: replications must be positive");
    if (config.settings.empty() || config.methods.empty()) {
        throw std::invalid_argument("benchmark: need at least one setting and one method");
    }
    if (config.test_n == 0) throw std::invalid_argument("benchmark: test_n must be positive");

    const std::size_t per_setting = config.replications * config.methods.size();
    const std::size_t tasks = config.settings.size() * per_setting;
    BenchmarkResult result;
    result.replications.resize(tasks);
    std::mutex progress_mutex;
    parallel_for(tasks, config.workers, [&](std::size_t t) {
        const std::size_t s = t / per_setting;
        const std::size_t rep = (t % per_setting) / config.methods.size();
        const Method method = config.methods[t % config.methods.size()];
        result.replications[t] = run_replication(config, s, rep, method);
        if (progress) {
            std::lock_guard lock(progress_mutex);
            progress(result.replications[t]);
        }
    });

    for (std::size_t s = 0; s < config.settings.size(); ++s) {
        for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
            BenchmarkRow row;
            row.design = config.design;
            row.setting = config.settings[s];
            row.method = config.methods[mi];
            row.replications = config.replications;
            std::vector<double> mses;
            for (std::size_t rep = 0; rep < config.replications; ++rep) {
                const auto& r = result.replications[s * per_setting + rep * config.methods.size() + mi];
                mses.push_back(r.test_mse);
                if (!r.converged) row.converged = false;
            }
            row.median_mse = median(mses);
            row.se = median_standard_error(mses);
            result.rows.push_back(row);
        }
    }
    return result;
}

void write_benchmark_csv(std::ostream& out, const BenchmarkResult& result)
{
    out << "design,n,p1,sigma,method,replications,median_mse,se,converged\n";
    for (const auto& row : result.rows) {
        out << to_string(row.design) << ',' << row.setting.n << ',' << row.setting.p1 << ','
            << format_double(row.setting.sigma) << ',' << to_string(row.method) << ',' << row.replications << ','
            << format_double(row.median_mse) << ',' << format_double(row.se) << ','
            << (row.converged ? 1 : 0) << '\n';
    }
}

void write_replications_csv(std::ostream& out, const BenchmarkConfig& config, const BenchmarkResult& result)
{
    out << "design,n,p1,sigma,replication,method,test_mse,lambda,rank,converged\n";
    for (const auto& r : result.replications) {
        const auto& s = config.settings.at(r.setting);
        out << to_string(config.design) << ',' << s.n << ',' << s.p1 << ',' << format_double(s.sigma) << ','
            << r.replication << ',' << to_string(r.method) << ',' << format_double(r.test_mse) << ','
            << format_double(r.lambda) << ',' << r.rank << ',' << (r.converged ? 1 : 0) << '\n';
    }
}

} // namespace star
