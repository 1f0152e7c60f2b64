#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "star/cv.hpp"
#include "star/sim.hpp"

namespace star {

enum class Method { star, tlr };

std::string to_string(Method method);
Method parse_method(const std::string& name);

/// splitmix64 output for `state + (stream + 1) * golden gamma`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Median of a non-empty sample.
double median(std::vector<double> values);
/// Large-sample standard error of the median: 1.2533 * sd / sqrt(n); 0 for n < 2.
double median_standard_error(const std::vector<double>& values);

struct BenchmarkSetting {
    std::size_t n = 400;
    std::size_t p1 = 20;
    double sigma = 0.1;
};

struct BenchmarkConfig {
    Design design = Design::general;
    std::vector<BenchmarkSetting> settings = {BenchmarkSetting{}};
    double low = 0.0;
    double high = 1.0;
    std::size_t replications = 20;
    std::size_t test_n = 2000;
    std::uint64_t seed = 1;
    std::vector<Method> methods = {Method::star, Method::tlr};
    /// Selection config for STAR; TLR uses it with the identity basis.
    CvConfig cv;
    /// Concurrent (setting, replication, method) tasks.
    std::size_t workers = 1;
};

struct ReplicationResult {
    std::size_t setting = 0;
    std::size_t replication = 0;
    Method method = Method::star;
    double test_mse = 0.0;
    double lambda = 0.0;
    std::size_t rank = 0;
    bool converged = true;
    double seconds = 0.0;
};

struct BenchmarkRow {
    Design design = Design::general;
    BenchmarkSetting setting;
    Method method = Method::star;
    std::size_t replications = 0;
    double median_mse = 0.0;
    double se = 0.0;
    bool converged = true;
};

struct BenchmarkResult {
    std::vector<BenchmarkRow> rows;
    std::vector<ReplicationResult> replications;
};

/// Simulated training and test sets of one replication (shared by all methods).
struct ReplicationData {
    SimOutput train;
    SimOutput test;
    std::uint64_t cv_seed = 0;
};
ReplicationData replication_data(const BenchmarkConfig& config, std::size_t setting, std::size_t replication);

/// Cross-validates (lambda, R), refits on the full training set and scores the noisy test response.
ReplicationResult run_replication(const BenchmarkConfig& config, std::size_t setting, std::size_t replication,
                                  Method method);

/// `progress` is called after each finished task (from worker threads, serialized).
BenchmarkResult run_benchmark(const BenchmarkConfig& config,
                              const std::function<void(const ReplicationResult&)>& progress = {});

/// design,n,p1,sigma,method,replications,median_mse,se; no timing columns.
void write_benchmark_csv(std::ostream& out, const BenchmarkResult& result);
void write_replications_csv(std::ostream& out, const BenchmarkConfig& config, const BenchmarkResult& result);

} // namespace star
