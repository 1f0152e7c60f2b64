#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "star/baselines.hpp"
#include "star/benchmark.hpp"
#include "star/cv.hpp"
#include "star/io.hpp"
#include "star/model.hpp"
#include "star/sensitivity.hpp"
#include "star/settings.hpp"
#include "star/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNotConverged = 3;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Command {
    CLI::App* app = nullptr;
    std::string config;
    std::map<std::string, std::string> overrides;
};

std::string flag_name(const std::string& key)
{
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    return "--" + name;
}

Command& add_command(CLI::App& app, std::map<std::string, Command>& commands, const std::string& name,
                     const std::string& description)
{
    auto& cmd = commands[name];
    cmd.app = app.add_subcommand(name, description);
    cmd.app->add_option("-c,--config", cmd.config, "key = value configuration file");
    for (const auto& s : star::setting_registry()) {
        cmd.app->add_option_function<std::string>(
            flag_name(s.key), [&cmd, key = std::string(s.key)](const std::string& v) { cmd.overrides[key] = v; },
            std::string(s.help) + " [" + s.default_value + "]");
    }
    return cmd;
}

star::Settings resolve(const Command& cmd)
{
    star::Settings settings;
    if (!cmd.config.empty()) settings.merge(star::load_config(cmd.config));
    for (const auto& [k, v] : cmd.overrides) settings.set(k, v);
    std::cerr << "# resolved configuration\n";
    settings.print(std::cerr);
    std::cerr << "# seed " << settings.get("seed") << " fit_seed " << settings.get("fit_seed") << '\n';
    return settings;
}

const std::string& require(const star::Settings& s, const std::string& key)
{
    const auto& v = s.get(key);
    if (v.empty()) throw UsageError("missing required setting '" + key + "'");
    return v;
}

// Writes to the `out` path, or stdout when it is empty.
template <class F>
void emit(const star::Settings& s, F&& write)
{
    const auto& path = s.get("out");
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw star::DataError("cannot open '" + path + "' for writing");
    write(out);
}

int run_simulate(const star::Settings& s)
{
    const auto sim = star::simulate(s.sim());
    emit(s, [&](std::ostream& out) { star::write_dataset(out, sim.data); });
    return kExitOk;
}

void print_fit_summary(const star::StarModel& model)
{
    const auto& fit = model.fit;
    std::cout << "lambda " << star::format_double(fit.lambda) << " rank " << fit.rank << '\n';
    std::cout << "sweeps " << fit.sweeps << " converged " << (fit.converged ? "yes" : "no") << '\n';
    std::cout << "objective " << star::format_double(fit.objective_trace.empty() ? 0.0 : fit.objective_trace.back())
              << '\n';
    for (std::size_t k = 0; k < fit.active_sets.size(); ++k) {
        std::cout << "active way " << (k + 1) << ':';
        for (auto j : fit.active_sets[k]) std::cout << ' ' << (j + 1);
        std::cout << '\n';
    }
}

int run_fit(const star::Settings& s)
{
    const auto& model_path = require(s, "model");
    const auto data = star::load_dataset(require(s, "data"));
    const auto model = star::train(data, s.basis(), s.fit());
    star::save_model(model_path, model);
    print_fit_summary(model);
    return model.fit.converged ? kExitOk : kExitNotConverged;
}

int run_predict(const star::Settings& s)
{
    const auto model = star::load_model(require(s, "model"));
    const auto data = star::load_dataset(require(s, "data"));
    const auto pred = star::predict(model, data);
    emit(s, [&](std::ostream& out) {
        out << "prediction\n";
        for (Eigen::Index i = 0; i < pred.size(); ++i) out << star::format_double(pred[i]) << '\n';
    });
    std::cerr << "mse " << star::format_double(star::mse(pred, data.y)) << '\n';
    return kExitOk;
}

int run_cv(const star::Settings& s)
{
    const auto data = star::load_dataset(require(s, "data"));
    const auto config = s.cv();
    const auto report = star::cross_validate(data, config);
    emit(s, [&](std::ostream& out) {
        out << "lambda,rank,mean_mse";
        for (std::size_t f = 0; f < config.folds; ++f) out << ",fold" << (f + 1);
        out << ",converged\n";
        for (const auto& cell : report.cells) {
            out << star::format_double(cell.lambda) << ',' << cell.rank << ',' << star::format_double(cell.mean_mse);
            for (double v : cell.fold_mse) out << ',' << star::format_double(v);
            out << ',' << (cell.converged ? 1 : 0) << '\n';
        }
    });
    const auto& best = report.best();
    std::cerr << "selected lambda " << star::format_double(best.lambda) << " rank " << best.rank << " mean_mse "
              << star::format_double(best.mean_mse) << '\n';
    bool converged = report.all_converged;
    if (!s.get("model").empty()) {
        auto fc = config.fit;
        fc.rank = best.rank;
        fc.lambda = best.lambda;
        const auto model = star::train(data, config.basis, fc);
        star::save_model(s.get("model"), model);
        converged = converged && model.fit.converged;
    }
    return converged ? kExitOk : kExitNotConverged;
}

int run_benchmark(const star::Settings& s)
{
    const auto config = s.benchmark();
    const auto start = std::chrono::steady_clock::now();
    const auto result = star::run_benchmark(config, [&](const star::ReplicationResult& r) {
        const auto& row = config.settings[r.setting];
        std::cerr << "n=" << row.n << " p1=" << row.p1 << " sigma=" << row.sigma << " rep=" << r.replication << ' '
                  << star::to_string(r.method) << " mse=" << r.test_mse << " time=" << r.seconds << "s\n";
    });
    emit(s, [&](std::ostream& out) { star::write_benchmark_csv(out, result); });
    if (!s.get("replications_out").empty()) {
        std::ofstream out(s.get("replications_out"));
        if (!out) throw star::DataError("cannot open '" + s.get("replications_out") + "' for writing");
        star::write_replications_csv(out, config, result);
    }
    std::cerr << "total time " << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
              << "s\n";
    const bool converged =
        std::all_of(result.rows.begin(), result.rows.end(), [](const auto& r) { return r.converged; });
    return converged ? kExitOk : kExitNotConverged;
}

int run_sensitivity(const star::Settings& s)
{
    const auto model = star::load_model(require(s, "model"));
    const auto data = star::load_dataset(require(s, "data"));
    const auto report = star::sensitivity(model, data, s.sensitivity());
    emit(s, [&](std::ostream& out) { star::write_sensitivity_csv(out, report); });
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sparse tensor additive regression"};
    app.require_subcommand(1);
    std::map<std::string, Command> commands;
    add_command(app, commands, "simulate", "Write a simulated dataset CSV");
    add_command(app, commands, "fit", "Fit a model at one (lambda, rank) and save it");
    add_command(app, commands, "predict", "Score a dataset with a saved model");
    add_command(app, commands, "cv", "Cross-validate over the (lambda, rank) grid");
    add_command(app, commands, "benchmark", "Replicated simulation benchmark of STAR and TLR");
    add_command(app, commands, "sensitivity", "Mean prediction change per position or slice");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        for (const auto& [name, cmd] : commands) {
            if (!cmd.app->parsed()) continue;
            const auto settings = resolve(cmd);
            if (name == "simulate") return run_simulate(settings);
            if (name == "fit") return run_fit(settings);
            if (name == "predict") return run_predict(settings);
            if (name == "cv") return run_cv(settings);
            if (name == "benchmark") return run_benchmark(settings);
            if (name == "sensitivity") return run_sensitivity(settings);
        }
    } catch (const star::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const star::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
