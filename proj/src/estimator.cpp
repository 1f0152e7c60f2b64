#include "star/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <tuple>

namespace star {

namespace {

void check_compatible(const FeaturizedDataset& data, const CpFactorBundle& bundle)
{
    if (bundle.dims() != data.shape || bundle.basis_count() != data.basis_count) {
        throw std::invalid_argument("bundle is not compatible with the featurized data");
    }
}

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

} // namespace

DesignMatrix build_design(const FeaturizedDataset& data, const CpFactorBundle& bundle,
                          std::size_t k)
{
    check_compatible(data, bundle);
    if (k >= bundle.ways()) throw std::out_of_range("build_design: way out of range");

    const std::size_t m = bundle.ways();
    const std::size_t d = bundle.basis_count();
    const std::size_t R = bundle.rank();
    const std::size_t rd = R * d;
    const std::size_t P = data.positions();
    const auto& dims = bundle.dims();
    const auto strides = row_major_strides(dims);

    // weights(pos, r * d + h) = prod_{u != k} beta_{uhr}[j_u(pos)]
    RowMatrix weights(idx(P), idx(rd));
    std::vector<std::size_t> way_index(P);
    for (std::size_t pos = 0; pos < P; ++pos) {
        way_index[pos] = (pos / strides[k]) % dims[k];
        for (std::size_t r = 0; r < R; ++r) {
            for (std::size_t h = 0; h < d; ++h) {
                double w = 1.0;
                for (std::size_t u = 0; u < m; ++u) {
                    if (u == k) continue;
                    w *= bundle.coef(u, h, r, (pos / strides[u]) % dims[u]);
                }
                weights(idx(pos), idx(r * d + h)) = w;
            }
        }
    }

    RowMatrix out = RowMatrix::Zero(idx(data.n()), idx(dims[k] * rd));
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double* feat = data.features.row(idx(i)).data();
        double* row = out.row(idx(i)).data();
        for (std::size_t pos = 0; pos < P; ++pos) {
            double* dst = row + way_index[pos] * rd;
            const double* w = weights.row(idx(pos)).data();
            const double* f = feat + pos * d;
            for (std::size_t r = 0; r < R; ++r) {
                for (std::size_t h = 0; h < d; ++h) dst[r * d + h] += f[h] * w[r * d + h];
            }
        }
    }
    return {k, rd, Eigen::MatrixXd(out)};
}

Eigen::VectorXd fitted_values(const FeaturizedDataset& data, const CpFactorBundle& bundle)
{
    check_compatible(data, bundle);
    const std::size_t d = bundle.basis_count();
    const std::size_t P = data.positions();
    // coefs(pos * d + h) = [B_h]_pos
    Eigen::VectorXd coefs(idx(P * d));
    for (std::size_t h = 0; h < d; ++h) {
        const auto B = cp_compose(bundle, h);
        for (std::size_t pos = 0; pos < P; ++pos) coefs[idx(pos * d + h)] = B[pos];
    }
    return data.features * coefs;
}

double group_penalty(const CpFactorBundle& bundle, std::span<const double> way_lambdas)
{
    if (way_lambdas.size() != bundle.ways()) {
        throw std::invalid_argument("group_penalty: one penalty per way required");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < bundle.ways(); ++k) {
        if (way_lambdas[k] == 0.0) continue;
        double s = 0.0;
        for (std::size_t j = 0; j < bundle.dims()[k]; ++j) s += bundle.group_norm(k, j);
        total += way_lambdas[k] * s;
    }
    return total;
}

double objective(const FeaturizedDataset& data, const CpFactorBundle& bundle,
                 std::span<const double> way_lambdas)
{
    const Eigen::VectorXd resid = data.centered_response() - fitted_values(data, bundle);
    return resid.squaredNorm() / static_cast<double>(data.n()) +
           group_penalty(bundle, way_lambdas);
}

double objective(const FeaturizedDataset& data, const CpFactorBundle& bundle, double lambda)
{
    const std::vector<double> lambdas(bundle.ways(), lambda);
    return objective(data, bundle, lambdas);
}

Eigen::VectorXd grad_block(const FeaturizedDataset& data, const CpFactorBundle& bundle,
                           std::size_t k)
{
    const auto design = build_design(data, bundle, k);
    const Eigen::VectorXd resid = design.matrix * bundle.factor(k) - data.centered_response();
    return (2.0 / static_cast<double>(data.n())) * (design.matrix.transpose() * resid);
}

Eigen::VectorXd group_prox(const Eigen::VectorXd& v, double tau, std::size_t group_size)
{
    if (tau < 0.0) throw std::invalid_argument("group_prox: threshold must be non-negative");
    if (group_size == 0 || v.size() % idx(group_size) != 0) {
        throw std::invalid_argument("group_prox: length is not a multiple of the group size");
    }
    Eigen::VectorXd out = v;
    for (Eigen::Index g = 0; g < v.size(); g += idx(group_size)) {
        auto seg = out.segment(g, idx(group_size));
        const double norm = seg.norm();
        if (norm <= tau) seg.setZero();
        else seg *= 1.0 - tau / norm;
    }
    return out;
}

BlockProblem BlockProblem::from_design(const DesignMatrix& design, const Eigen::VectorXd& ytilde)
{
    const auto& F = design.matrix;
    if (F.rows() != ytilde.size()) throw std::invalid_argument("BlockProblem: row mismatch");
    const double inv_n = 1.0 / static_cast<double>(F.rows());
    BlockProblem p;
    p.group_size = design.group_size;
    const auto cols = F.cols();
    p.gram = Eigen::MatrixXd::Zero(cols, cols);
    p.gram.selfadjointView<Eigen::Lower>().rankUpdate(F.transpose(), inv_n);
    p.gram.triangularView<Eigen::StrictlyUpper>() = p.gram.transpose();
    p.linear = inv_n * (F.transpose() * ytilde);
    p.constant = inv_n * ytilde.squaredNorm();
    const std::size_t groups = static_cast<std::size_t>(cols) / p.group_size;
    p.degenerate.assign(groups, false);
    for (std::size_t g = 0; g < groups; ++g) {
        const auto block = F.middleCols(idx(g * p.group_size), idx(p.group_size));
        p.degenerate[g] = (block.array() == 0.0).all();
    }
    return p;
}

double BlockProblem::loss(const Eigen::VectorXd& b) const
{
    return b.dot(gram * b) - 2.0 * linear.dot(b) + constant;
}

Eigen::VectorXd BlockProblem::gradient(const Eigen::VectorXd& b) const
{
    return 2.0 * (gram * b - linear);
}

double BlockProblem::lambda_max() const
{
    double best = 0.0;
    for (std::size_t g = 0; g < groups(); ++g) {
        if (degenerate[g]) continue;
        best = std::max(best, 2.0 * linear.segment(idx(g * group_size), idx(group_size)).norm());
    }
    return best;
}

namespace {

double kkt_from_gradient(const BlockProblem& problem, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& grad, double lambda)
{
    double worst = 0.0;
    const auto gs = idx(problem.group_size);
    for (std::size_t g = 0; g < problem.groups(); ++g) {
        if (problem.degenerate[g]) continue;
        const auto start = idx(g) * gs;
        const auto bg = b.segment(start, gs);
        const auto gg = grad.segment(start, gs);
        const double nb = bg.norm();
        double viol = 0.0;
        if (nb > 0.0) viol = (gg + (lambda / nb) * bg).norm();
        else viol = std::max(0.0, gg.norm() - lambda);
        worst = std::max(worst, viol);
    }
    return worst;
}

double penalty_of(const Eigen::VectorXd& b, std::size_t group_size)
{
    double s = 0.0;
    for (Eigen::Index g = 0; g < b.size(); g += idx(group_size)) {
        s += b.segment(g, idx(group_size)).norm();
    }
    return s;
}

void zero_degenerate(const BlockProblem& problem, Eigen::VectorXd& b)
{
    for (std::size_t g = 0; g < problem.groups(); ++g) {
        if (problem.degenerate[g]) b.segment(idx(g * problem.group_size), idx(problem.group_size)).setZero();
    }
}

} // namespace

double kkt_residual(const BlockProblem& problem, const Eigen::VectorXd& b, double lambda)
{
    return kkt_from_gradient(problem, b, problem.gradient(b), lambda);
}

double power_iteration(const Eigen::MatrixXd& sym, int max_iter, double rel_tol)
{
    const auto n = sym.rows();
    if (n == 0) return 0.0;
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * std::sin(double(i + 1));
    v.normalize();
    double estimate = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd w = sym * v;
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        const double next = v.dot(w);
        v = w / norm;
        if (std::abs(next - estimate) <= rel_tol * std::abs(next)) return next;
        estimate = next;
    }
    return estimate;
}

BlockSolution solve_block(const BlockProblem& problem, double lambda, const Eigen::VectorXd& warm,
                          const SolverOptions& options)
{
    if (lambda < 0.0) throw std::invalid_argument("solve_block: lambda must be non-negative");
    if (warm.size() != problem.linear.size()) {
        throw std::invalid_argument("solve_block: warm start has the wrong length");
    }
    const std::size_t gs = problem.group_size;
    const auto& G = problem.gram;
    const auto& c = problem.linear;

    auto full_objective = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& Gx) {
        return x.dot(Gx) - 2.0 * c.dot(x) + problem.constant + lambda * penalty_of(x, gs);
    };

    BlockSolution sol;
    Eigen::VectorXd x = warm;
    zero_degenerate(problem, x);
    Eigen::VectorXd Gx = G * x;
    double fx = full_objective(x, Gx);

    // A warm start that already satisfies the KKT conditions needs no iterations.
    sol.kkt = kkt_from_gradient(problem, x, 2.0 * (Gx - c), lambda);
    if (sol.kkt <= options.tol) {
        sol.b = std::move(x);
        sol.converged = true;
        return sol;
    }

    double L = 2.0 * power_iteration(G, 500, 1e-6) * (1.0 + 1e-6);
    if (!(L > 0.0)) {
        // Every group is degenerate: zero is the only sensible solution.
        sol.b = Eigen::VectorXd::Zero(x.size());
        sol.converged = true;
        sol.kkt = 0.0;
        return sol;
    }

    Eigen::VectorXd y = x;
    Eigen::VectorXd Gy = Gx;
    double t = 1.0;
    bool at_restart = true;
    for (int it = 1; it <= options.max_iter; ++it) {
        sol.iterations = it;
        const Eigen::VectorXd grad_y = 2.0 * (Gy - c);
        Eigen::VectorXd x_new = group_prox(y - grad_y / L, lambda / L, gs);
        zero_degenerate(problem, x_new);
        Eigen::VectorXd Gx_new = G * x_new;
        const double f_new = full_objective(x_new, Gx_new);

        if (f_new > fx + 1e-15 * std::max(1.0, std::abs(fx))) {
            if (at_restart) {
                // A plain proximal step failed to descend: the step is too long.
                L *= 2.0;
            }
            t = 1.0;
            y = x;
            Gy = Gx;
            at_restart = true;
            continue;
        }

        const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double beta = (t - 1.0) / t_new;
        y = x_new + beta * (x_new - x);
        Gy = Gx_new + beta * (Gx_new - Gx);
        x = std::move(x_new);
        Gx = std::move(Gx_new);
        fx = f_new;
        t = t_new;
        at_restart = false;

        sol.kkt = kkt_from_gradient(problem, x, 2.0 * (Gx - c), lambda);
        if (sol.kkt <= options.tol) {
            sol.converged = true;
            break;
        }
    }
    sol.b = std::move(x);
    return sol;
}

BlockSolution solve_block(const DesignMatrix& design, const Eigen::VectorXd& ytilde,
                          double lambda, const Eigen::VectorXd& warm, const SolverOptions& options)
{
    return solve_block(BlockProblem::from_design(design, ytilde), lambda, warm, options);
}

Eigen::VectorXd solve_ridge(const BlockProblem& problem, double mu)
{
    const auto cols = problem.gram.rows();
    std::vector<Eigen::Index> keep;
    for (std::size_t g = 0; g < problem.groups(); ++g) {
        if (problem.degenerate[g]) continue;
        for (std::size_t e = 0; e < problem.group_size; ++e) keep.push_back(idx(g * problem.group_size + e));
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(cols);
    if (keep.empty()) return b;
    const auto nk = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd A(nk, nk);
    Eigen::VectorXd rhs(nk);
    for (Eigen::Index a = 0; a < nk; ++a) {
        rhs[a] = problem.linear[keep[static_cast<std::size_t>(a)]];
        for (Eigen::Index e = 0; e < nk; ++e) {
            A(a, e) = problem.gram(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(e)]);
        }
        A(a, a) += mu;
    }
    const Eigen::VectorXd sol = A.ldlt().solve(rhs);
    for (Eigen::Index a = 0; a < nk; ++a) b[keep[static_cast<std::size_t>(a)]] = sol[a];
    return b;
}

void FitConfig::validate(std::size_t ways) const
{
    if (rank == 0) throw std::invalid_argument("FitConfig: rank must be positive");
    if (!(lambda >= 0.0)) throw std::invalid_argument("FitConfig: lambda must be non-negative");
    if (!way_lambdas.empty()) {
        if (way_lambdas.size() != ways) {
            throw std::invalid_argument("FitConfig: way_lambdas needs one entry per way");
        }
        for (double l : way_lambdas) {
            if (!(l >= 0.0)) throw std::invalid_argument("FitConfig: lambdas must be non-negative");
        }
    }
    if (max_sweeps < 1) throw std::invalid_argument("FitConfig: max_sweeps must be >= 1");
    if (!(tol > 0.0) || !(inner_tol > 0.0)) {
        throw std::invalid_argument("FitConfig: tolerances must be positive");
    }
    if (inner_max_iter < 1) throw std::invalid_argument("FitConfig: inner_max_iter must be >= 1");
    if (!(ridge_strength > 0.0)) throw std::invalid_argument("FitConfig: ridge_strength must be positive");
    if (ridge_sweeps < 0) throw std::invalid_argument("FitConfig: ridge_sweeps must be >= 0");
}

std::vector<double> FitConfig::lambdas(std::size_t ways) const
{
    if (!way_lambdas.empty()) return way_lambdas;
    return std::vector<double>(ways, lambda);
}

CpFactorBundle initialize(const FeaturizedDataset& data, const FitConfig& config)
{
    config.validate(data.shape.size());
    std::mt19937_64 rng(config.seed);
    auto bundle = random_unit_groups(data.shape, config.rank, data.basis_count, rng);
    const Eigen::VectorXd ytilde = data.centered_response();
    for (int s = 0; s < config.ridge_sweeps; ++s) {
        for (std::size_t k = 0; k < bundle.ways(); ++k) {
            const auto problem = BlockProblem::from_design(build_design(data, bundle, k), ytilde);
            const double scale = problem.gram.diagonal().mean();
            const double mu = config.ridge_strength * (scale > 0.0 ? scale : 1.0);
            bundle.set_factor(k, solve_ridge(problem, mu));
        }
    }
    rebalance(bundle);
    return bundle;
}

double lambda_max(const FeaturizedDataset& data, const CpFactorBundle& bundle)
{
    const Eigen::VectorXd ytilde = data.centered_response();
    double best = 0.0;
    for (std::size_t k = 0; k < bundle.ways(); ++k) {
        const auto problem = BlockProblem::from_design(build_design(data, bundle, k), ytilde);
        best = std::max(best, problem.lambda_max());
    }
    return best;
}

namespace {

bool constant_response(const FeaturizedDataset& data)
{
    if (data.n() == 0) return true;
    const double spread = data.y.maxCoeff() - data.y.minCoeff();
    return !(spread > 1e-14 * std::max(1.0, std::abs(data.intercept)));
}

FitResult degenerate_result(const FeaturizedDataset& data, const FitConfig& config)
{
    FitResult result;
    result.bundle = CpFactorBundle(data.shape, config.rank, data.basis_count);
    result.intercept = data.intercept;
    result.active_sets.assign(data.shape.size(), {});
    result.degenerate = true;
    result.converged = true;
    result.lambda = config.lambda;
    result.rank = config.rank;
    result.objective_trace.push_back(objective(data, result.bundle, config.lambdas(data.shape.size())));
    return result;
}

FitResult run_sweeps(const FeaturizedDataset& data, const FitConfig& config, CpFactorBundle bundle)
{
    const std::size_t m = bundle.ways();
    const auto lambdas = config.lambdas(m);
    const Eigen::VectorXd ytilde = data.centered_response();
    const SolverOptions inner{config.inner_tol, config.inner_max_iter};

    FitResult result;
    result.intercept = data.intercept;
    result.lambda = config.lambda;
    result.rank = config.rank;
    result.lambda_max_at_start = lambda_max(data, bundle);
    double current = objective(data, bundle, lambdas);
    result.objective_trace.push_back(current);

    for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
        const CpFactorBundle previous = bundle;
        const CpFactorBundle& source = config.order == SweepOrder::jacobi ? previous : bundle;
        std::vector<Eigen::VectorXd> updates(m);
        for (std::size_t k = 0; k < m; ++k) {
            const auto problem = BlockProblem::from_design(build_design(data, source, k), ytilde);
            auto sol = solve_block(problem, lambdas[k], bundle.factor(k), inner);
            result.inner_converged = result.inner_converged && sol.converged;
            if (config.order == SweepOrder::jacobi) updates[k] = std::move(sol.b);
            else bundle.set_factor(k, std::move(sol.b));
        }
        if (config.order == SweepOrder::jacobi) {
            for (std::size_t k = 0; k < m; ++k) bundle.set_factor(k, std::move(updates[k]));
        }
        current = objective(data, bundle, lambdas);
        if (config.rebalance) {
            CpFactorBundle candidate = bundle;
            rebalance_ranks(candidate);
            const double value = objective(data, candidate, lambdas);
            if (value <= current) {
                bundle = std::move(candidate);
                current = value;
            }
        }
        result.objective_trace.push_back(current);
        result.sweeps = sweep;

        double change = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            change = std::max(change, (bundle.factor(k) - previous.factor(k)).norm());
        }
        if (change <= config.tol) {
            result.converged = true;
            break;
        }
    }
    for (std::size_t k = 0; k < m; ++k) result.active_sets.push_back(bundle.active_set(k));
    result.bundle = std::move(bundle);
    return result;
}

} // namespace

FitResult fit(const FeaturizedDataset& data, const FitConfig& config)
{
    config.validate(data.shape.size());
    if (data.n() < 2) throw DataError("fit needs at least two samples");
    if (constant_response(data)) return degenerate_result(data, config);
    return run_sweeps(data, config, initialize(data, config));
}

FitResult fit(const FeaturizedDataset& data, const FitConfig& config, const CpFactorBundle& start)
{
    config.validate(data.shape.size());
    if (data.n() < 2) throw DataError("fit needs at least two samples");
    check_compatible(data, start);
    if (start.rank() != config.rank) throw std::invalid_argument("fit: start rank differs from config");
    if (constant_response(data)) return degenerate_result(data, config);
    return run_sweeps(data, config, start);
}

std::vector<FitResult> fit_path(const FeaturizedDataset& data, const FitConfig& config,
                                std::span<const double> lambdas)
{
    config.validate(data.shape.size());
    if (data.n() < 2) throw DataError("fit needs at least two samples");
    std::vector<FitResult> results(lambdas.size());
    std::vector<std::size_t> order(lambdas.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return lambdas[a] > lambdas[b]; });

    if (constant_response(data)) {
        for (std::size_t i : order) {
            FitConfig c = config;
            c.lambda = lambdas[i];
            c.way_lambdas.clear();
            results[i] = degenerate_result(data, c);
        }
        return results;
    }

    const CpFactorBundle init = initialize(data, config);
    const CpFactorBundle* warm = &init;
    for (std::size_t i : order) {
        FitConfig c = config;
        c.lambda = lambdas[i];
        c.way_lambdas.clear();
        const bool from_init = warm == &init || config.path_start == PathStart::cold;
        results[i] = run_sweeps(data, c, from_init ? init : *warm);
        if (config.path_start == PathStart::best && !from_init) {
            FitResult cold = run_sweeps(data, c, init);
            if (cold.objective_trace.back() < results[i].objective_trace.back()) results[i] = std::move(cold);
        }
        warm = results[i].bundle.is_zero() ? &init : &results[i].bundle;
    }
    return results;
}

namespace {

Eigen::VectorXd rank_block(const CpFactorBundle& b, std::size_t k, std::size_t r)
{
    Eigen::VectorXd v(idx(b.dims()[k] * b.basis_count()));
    Eigen::Index e = 0;
    for (std::size_t j = 0; j < b.dims()[k]; ++j) {
        for (std::size_t h = 0; h < b.basis_count(); ++h) v[e++] = b.coef(k, h, r, j);
    }
    return v;
}

CpFactorBundle permute_ranks(const CpFactorBundle& b, const std::vector<std::size_t>& perm)
{
    CpFactorBundle out(b.dims(), b.rank(), b.basis_count());
    for (std::size_t k = 0; k < b.ways(); ++k) {
        for (std::size_t j = 0; j < b.dims()[k]; ++j) {
            for (std::size_t r = 0; r < b.rank(); ++r) {
                for (std::size_t h = 0; h < b.basis_count(); ++h) {
                    out.coef(k, h, r, j) = b.coef(k, h, perm[r], j);
                }
            }
        }
    }
    return out;
}

} // namespace

CpFactorBundle canonical_form(const CpFactorBundle& bundle)
{
    CpFactorBundle out = bundle;
    rebalance(out);
    const std::size_t m = out.ways();
    for (std::size_t h = 0; h < out.basis_count(); ++h) {
        for (std::size_t r = 0; r < out.rank(); ++r) {
            for (std::size_t k = 0; k + 1 < m; ++k) {
                double largest = 0.0;
                for (std::size_t j = 0; j < out.dims()[k]; ++j) {
                    const double v = out.coef(k, h, r, j);
                    if (std::abs(v) > std::abs(largest)) largest = v;
                }
                if (largest < 0.0) {
                    for (std::size_t j = 0; j < out.dims()[k]; ++j) out.coef(k, h, r, j) = -out.coef(k, h, r, j);
                    for (std::size_t j = 0; j < out.dims()[m - 1]; ++j) {
                        out.coef(m - 1, h, r, j) = -out.coef(m - 1, h, r, j);
                    }
                }
            }
        }
    }
    return out;
}

double estimation_error(const CpFactorBundle& estimate, const CpFactorBundle& truth)
{
    if (!estimate.compatible(truth)) throw std::invalid_argument("estimation_error: shape mismatch");
    const std::size_t R = truth.rank();

    // Greedy matching of estimate ranks to truth ranks by |cosine| of way-1 blocks.
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t s = 0; s < R; ++s) {
        const Eigen::VectorXd u = rank_block(truth, 0, s);
        for (std::size_t r = 0; r < R; ++r) {
            const Eigen::VectorXd v = rank_block(estimate, 0, r);
            const double denom = u.norm() * v.norm();
            const double sim = denom > 0.0 ? std::abs(u.dot(v)) / denom : 0.0;
            pairs.emplace_back(sim, s, r);
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
    std::vector<std::size_t> perm(R, R);
    std::vector<bool> used(R, false);
    for (const auto& [sim, s, r] : pairs) {
        if (perm[s] != R || used[r]) continue;
        perm[s] = r;
        used[r] = true;
    }

    const auto aligned = canonical_form(permute_ranks(estimate, perm));
    const auto reference = canonical_form(truth);
    double err = 0.0;
    for (std::size_t k = 0; k < truth.ways(); ++k) {
        err += (aligned.factor(k) - reference.factor(k)).squaredNorm();
    }
    return err;
}

} // namespace star
