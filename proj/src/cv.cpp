#include "star/cv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "star/model.hpp"

namespace star {

double mse(std::span<const double> predictions, std::span<const double> targets)
{
    if (predictions.size() != targets.size()) throw std::invalid_argument("mse: length mismatch");
    if (predictions.empty()) throw std::invalid_argument("mse: empty input");
    double total = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = predictions[i] - targets[i];
        total += e * e;
    }
    return total / static_cast<double>(predictions.size());
}

double mse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets)
{
    return mse(std::span<const double>(predictions.data(), static_cast<std::size_t>(predictions.size())),
               std::span<const double>(targets.data(), static_cast<std::size_t>(targets.size())));
}

std::vector<std::size_t> assign_folds(std::size_t n, std::size_t folds, std::uint64_t seed)
{
    if (folds < 2) throw std::invalid_argument("assign_folds: need at least two folds");
    if (n < folds) throw std::invalid_argument("assign_folds: fewer samples than folds");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    // Fisher-Yates with an explicit draw so the order does not depend on the library's shuffle.
    for (std::size_t i = n - 1; i > 0; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i);
        std::swap(perm[i], perm[pick(rng)]);
    }
    std::vector<std::size_t> fold_of(n);
    for (std::size_t i = 0; i < n; ++i) fold_of[perm[i]] = i % folds;
    return fold_of;
}

std::vector<double> log_grid(double lambda_max, std::size_t points, double ratio)
{
    if (points == 0) throw std::invalid_argument("log_grid: need at least one point");
    if (!(lambda_max > 0.0) || !(ratio > 0.0) || ratio > 1.0) {
        throw std::invalid_argument("log_grid: need lambda_max > 0 and 0 < ratio <= 1");
    }
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double t = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
        grid[i] = lambda_max * std::pow(ratio, t);
    }
    return grid;
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task)
{
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

std::vector<double> lambda_grid(const RawData& data, const CvConfig& config, std::size_t rank)
{
    if (!config.lambdas.empty()) return config.lambdas;
    const auto featurized = featurize_training(data, config.basis);
    FitConfig fc = config.fit;
    fc.rank = rank;
    const double lmax = lambda_max(featurized, initialize(featurized, fc));
    if (!(lmax > 0.0)) return std::vector<double>(config.lambda_points, 0.0);
    return log_grid(lmax, config.lambda_points, config.lambda_ratio);
}

CvReport cross_validate(const RawData& data, const CvConfig& config)
{
    data.validate();
    if (config.ranks.empty()) throw std::invalid_argument("cross_validate: empty rank grid");
    if (config.lambdas.empty() && config.lambda_points == 0) {
        throw std::invalid_argument("cross_validate: empty penalty grid");
    }
    for (double l : config.lambdas) {
        if (!(l >= 0.0)) throw std::invalid_argument("cross_validate: penalties must be non-negative");
    }
    for (auto r : config.ranks) {
        if (r == 0) throw std::invalid_argument("cross_validate: ranks must be positive");
    }

    CvReport report;
    report.seed = config.seed;
    report.fold_of = assign_folds(data.n(), config.folds, config.seed);

    std::vector<std::vector<double>> grids;
    for (auto r : config.ranks) grids.push_back(lambda_grid(data, config, r));
    for (std::size_t ri = 0; ri < config.ranks.size(); ++ri) {
        for (double l : grids[ri]) {
            CvCell cell;
            cell.lambda = l;
            cell.rank = config.ranks[ri];
            cell.fold_mse.assign(config.folds, 0.0);
            cell.fold_converged.assign(config.folds, 1);
            report.cells.push_back(std::move(cell));
        }
    }

    std::vector<FeaturizedDataset> train(config.folds);
    std::vector<RawData> valid(config.folds);
    for (std::size_t f = 0; f < config.folds; ++f) {
        std::vector<std::size_t> tr;
        std::vector<std::size_t> va;
        for (std::size_t i = 0; i < data.n(); ++i) (report.fold_of[i] == f ? va : tr).push_back(i);
        train[f] = featurize_training(data.subset(tr), config.basis);
        valid[f] = data.subset(va);
        if (config.scaler_observer) config.scaler_observer(f, train[f].scaler);
    }

    std::vector<std::size_t> offsets(config.ranks.size(), 0);
    for (std::size_t ri = 1; ri < config.ranks.size(); ++ri) offsets[ri] = offsets[ri - 1] + grids[ri - 1].size();

    const std::size_t tasks = config.folds * config.ranks.size();
    parallel_for(tasks, config.workers, [&](std::size_t t) {
        const std::size_t f = t / config.ranks.size();
        const std::size_t ri = t % config.ranks.size();
        FitConfig fc = config.fit;
        fc.rank = config.ranks[ri];
        const auto path = fit_path(train[f], fc, grids[ri]);
        for (std::size_t li = 0; li < path.size(); ++li) {
            const auto model = make_model(train[f], path[li]);
            auto& cell = report.cells[offsets[ri] + li];
            cell.fold_mse[f] = mse(predict(model, valid[f]), valid[f].y);
            cell.fold_converged[f] = path[li].converged ? 1 : 0;
        }
    });

    for (auto& cell : report.cells) {
        cell.mean_mse = std::accumulate(cell.fold_mse.begin(), cell.fold_mse.end(), 0.0) /
                        static_cast<double>(config.folds);
        cell.converged = std::all_of(cell.fold_converged.begin(), cell.fold_converged.end(),
                                     [](int c) { return c != 0; });
        if (!cell.converged) report.all_converged = false;
    }

    std::vector<std::size_t> order(report.cells.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ca = report.cells[a];
        const auto& cb = report.cells[b];
        if (ca.lambda != cb.lambda) return ca.lambda > cb.lambda;
        return ca.rank < cb.rank;
    });
    report.selected = order.front();
    for (std::size_t i : order) {
        if (report.cells[i].mean_mse < report.cells[report.selected].mean_mse) report.selected = i;
    }
    return report;
}

} // namespace star
