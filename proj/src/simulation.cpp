#include "celltraj/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "celltraj/dataset.hpp"
#include "celltraj/errors.hpp"
#include "celltraj/parallel.hpp"
#include "celltraj/rng.hpp"

namespace celltraj {

namespace {

struct MeanSe {
    double mean;
    double se;
};

// Mean and standard error of the mean; one value has se 0, none gives NaN.
MeanSe mean_se(const std::vector<double>& xs) {
    if (xs.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    if (xs.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

}  // namespace

void validate(const SimConfig& cfg) {
    std::ostringstream msg;
    if (cfg.d < 2) {
        msg << "simulation needs d >= 2 types, got " << cfg.d;
        throw ConfigError(msg.str());
    }
    if (cfg.horizon < 2) {
        msg << "simulation horizon must be >= 2, got " << cfg.horizon;
        throw ConfigError(msg.str());
    }
    if (cfg.genes < 1) {
        msg << "simulation needs genes >= 1, got " << cfg.genes;
        throw ConfigError(msg.str());
    }
    if (cfg.cells < 1) {
        msg << "simulation needs cells >= 1, got " << cfg.cells;
        throw ConfigError(msg.str());
    }
    if (!(cfg.nu >= 0.0) || !std::isfinite(cfg.nu)) {
        msg << "growth amplitude nu must be finite and >= 0, got " << cfg.nu;
        throw ConfigError(msg.str());
    }
    if (!(cfg.eta >= 0.0) || !std::isfinite(cfg.eta)) {
        msg << "change magnitude eta must be finite and >= 0, got " << cfg.eta;
        throw ConfigError(msg.str());
    }
    std::vector<int> sorted = cfg.change_times;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] < 0 || sorted[i] > cfg.horizon - 1) {
            msg << "change time " << sorted[i] << " outside [0, " << cfg.horizon - 1 << "]";
            throw ConfigError(msg.str());
        }
        if (i > 0 && sorted[i] == sorted[i - 1]) {
            msg << "duplicate change time " << sorted[i];
            throw ConfigError(msg.str());
        }
    }
    if (!sorted.empty() && cfg.d % 2 != 0) {
        msg << "change reweighting splits the types into halves and needs even d, got "
            << cfg.d;
        throw ConfigError(msg.str());
    }
}

double growth_rate(int t, int type_index, const SimConfig& cfg) {
    const double x = static_cast<double>(t + type_index) / static_cast<double>(cfg.d);
    if (cfg.sine_form == SineForm::pi_inside) {
        return std::exp(cfg.nu * std::sin(std::numbers::pi * x));
    }
    return std::exp(cfg.nu * std::numbers::pi * std::sin(x));
}

GrowthProfile growth_profile(int t, const SimConfig& cfg) {
    Vector rates(cfg.d);
    for (int j = 0; j < cfg.d; ++j) rates[j] = growth_rate(t, j, cfg);
    return GrowthProfile(rates);
}

std::vector<Marginal> generate_marginals(const SimConfig& cfg) {
    validate(cfg);

    std::vector<int> sorted = cfg.change_times;
    std::sort(sorted.begin(), sorted.end());
    std::unordered_map<int, int> change_rank;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        change_rank.emplace(sorted[i], static_cast<int>(i));
    }

    std::vector<Marginal> out;
    out.reserve(static_cast<std::size_t>(cfg.horizon) + 1);
    out.push_back(Marginal::uniform(cfg.d));
    for (int t = 0; t < cfg.horizon; ++t) {
        Marginal next = apply_growth(out.back(), growth_profile(t, cfg));
        auto it = change_rank.find(t);
        if (it != change_rank.end()) {
            const double sign = it->second % 2 == 0 ? 1.0 : -1.0;
            Vector v = next.probs();
            for (int j = 0; j < cfg.d; ++j) {
                v[j] *= std::exp(cfg.eta * sign * (j < cfg.d / 2 ? 1.0 : -1.0));
            }
            next = Marginal(v / v.sum());
        }
        out.push_back(std::move(next));
    }
    return out;
}

Vector type_mean(int type_index, const SimConfig& cfg) {
    const double level = 0.5 * ((type_index + 1) - cfg.d) - 1.0;
    return Vector::Constant(cfg.genes, level);
}

CostMatrix true_cost(const SimConfig& cfg) {
    Matrix centroids(cfg.d, cfg.genes);
    for (int j = 0; j < cfg.d; ++j) centroids.row(j) = type_mean(j, cfg).transpose();
    return cost_from_centroids(centroids);
}

SimTruth generate_truth(const SimConfig& cfg, const SolverConfig& solver,
                        double smooth_delta) {
    SimTruth truth{generate_marginals(cfg), {}, true_cost(cfg),
                   {cfg.change_times.begin(), cfg.change_times.end()}};
    truth.plans.reserve(static_cast<std::size_t>(cfg.horizon));
    for (int t = 0; t < cfg.horizon; ++t) {
        truth.plans.push_back(solve_unbalanced(smooth(truth.marginals[t], smooth_delta),
                                               truth.marginals[t + 1], truth.cost, solver));
    }
    return truth;
}

std::vector<int> sample_labels(const Marginal& q, int n, std::uint64_t label_seed) {
    if (n < 1) {
        throw InputError("label sample size must be >= 1");
    }
    const int d = q.dim();
    std::vector<double> cum(static_cast<std::size_t>(d));
    double acc = 0.0;
    for (int j = 0; j < d; ++j) {
        acc += q[j];
        cum[static_cast<std::size_t>(j)] = acc;
    }
    cum.back() = 1.0;  // absorb rounding in the last bin

    RandomStream rs(label_seed);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double u = rs.next_double();
        const auto it = std::upper_bound(cum.begin(), cum.end(), u);
        labels[static_cast<std::size_t>(i)] =
            std::min(static_cast<int>(it - cum.begin()), d - 1);
    }
    return labels;
}

Matrix sample_expressions(const std::vector<int>& labels, const SimConfig& cfg,
                          std::uint64_t expr_seed) {
    const int n = static_cast<int>(labels.size());
    Matrix expr(n, cfg.genes);
    for (int i = 0; i < n; ++i) {
        const int j = labels[static_cast<std::size_t>(i)];
        if (j < 0 || j >= cfg.d) {
            std::ostringstream msg;
            msg << "label " << j << " at cell " << i << " outside [0, " << cfg.d - 1 << "]";
            throw InputError(msg.str());
        }
        const double level = 0.5 * ((j + 1) - cfg.d) - 1.0;
        RandomStream rs(derive_stream(expr_seed, {static_cast<std::uint64_t>(i)}));
        for (int g = 0; g < cfg.genes; ++g) expr(i, g) = level + rs.next_normal();
    }
    return expr;
}

SampledRun sample_run(const std::vector<Marginal>& marginals, const SimConfig& cfg,
                      std::uint64_t run_index) {
    if (marginals.size() != static_cast<std::size_t>(cfg.horizon) + 1) {
        std::ostringstream msg;
        msg << "expected " << cfg.horizon + 1 << " marginals, got " << marginals.size();
        throw InputError(msg.str());
    }

    SampledRun run;
    const int times = cfg.horizon + 1;
    const int n = cfg.cells;
    run.labels.reserve(static_cast<std::size_t>(times));
    run.empirical.reserve(static_cast<std::size_t>(times));
    run.pooled_expr.resize(static_cast<Eigen::Index>(times) * n, cfg.genes);
    run.pooled_labels.reserve(static_cast<std::size_t>(times) * n);

    for (int t = 0; t < times; ++t) {
        const std::uint64_t tu = static_cast<std::uint64_t>(t);
        std::vector<int> labels = sample_labels(
            marginals[static_cast<std::size_t>(t)], n,
            derive_stream(cfg.seed, {kStreamLabels, run_index, tu}));
        run.empirical.push_back(empirical_marginal(Snapshot{t, labels}, cfg.d));
        run.pooled_expr.middleRows(static_cast<Eigen::Index>(t) * n, n) =
            sample_expressions(labels, cfg,
                               derive_stream(cfg.seed, {kStreamExpr, run_index, tu}));
        run.pooled_labels.insert(run.pooled_labels.end(), labels.begin(), labels.end());
        run.labels.push_back(std::move(labels));
    }
    return run;
}

namespace {

// Leading eigenvector of a symmetric PSD matrix by power iteration. The start
// vector is the coordinate axis with the largest diagonal entry, so the result
// is deterministic; the sign is fixed by the largest-magnitude component.
Vector leading_axis(const Matrix& cov) {
    const Eigen::Index g = cov.rows();
    Eigen::Index start = 0;
    cov.diagonal().maxCoeff(&start);
    Vector v = Vector::Zero(g);
    v[start] = 1.0;
    for (int iter = 0; iter < 300; ++iter) {
        Vector next = cov * v;
        const double norm = next.norm();
        if (norm <= 0.0 || !std::isfinite(norm)) break;  // degenerate; keep v
        next /= norm;
        const double delta = (next - v).cwiseAbs().maxCoeff();
        v = next;
        if (delta < 1e-15) break;
    }
    Eigen::Index peak = 0;
    v.cwiseAbs().maxCoeff(&peak);
    if (v[peak] < 0.0) v = -v;
    return v;
}

}  // namespace

Matrix reduce_features(const Matrix& features, Reducer reducer) {
    if (reducer == Reducer::identity) return features;
    if (features.cols() <= 2) return features;  // already at target width
    if (features.rows() < 1) {
        throw InputError("feature reduction needs at least one record");
    }

    const Eigen::RowVectorXd center = features.colwise().mean();
    Matrix x = features.rowwise() - center;
    Matrix cov = (x.transpose() * x) / static_cast<double>(features.rows());

    Vector axis1 = leading_axis(cov);
    const double lambda1 = axis1.dot(cov * axis1);
    cov -= lambda1 * (axis1 * axis1.transpose());
    Vector axis2 = leading_axis(cov);

    Matrix reduced(features.rows(), 2);
    reduced.col(0) = x * axis1;
    reduced.col(1) = x * axis2;
    return reduced;
}

CostMatrix build_sim_cost(const Matrix& expressions, const std::vector<int>& labels,
                          const SimConfig& cfg) {
    const Matrix reduced = reduce_features(expressions, cfg.reducer);
    return cost_from_centroids(compute_centroids(reduced, labels, cfg.d));
}

BenchmarkReport run_benchmark(const BenchConfig& cfg) {
    validate(cfg.sim);
    if (cfg.runs < 1) {
        std::ostringstream msg;
        msg << "benchmark needs runs >= 1, got " << cfg.runs;
        throw ConfigError(msg.str());
    }

    const SimTruth truth = generate_truth(cfg.sim, cfg.solver, cfg.smooth_delta);
    const bool has_changes = !truth.change_times.empty();

    BenchmarkReport report;
    report.config = cfg;
    report.runs.resize(static_cast<std::size_t>(cfg.runs));

    parallel_for(cfg.runs, cfg.threads, [&](int r) {
        const SampledRun run =
            sample_run(truth.marginals, cfg.sim, static_cast<std::uint64_t>(r));
        const CostMatrix cost = build_sim_cost(run.pooled_expr, run.pooled_labels, cfg.sim);

        RunResult res;
        res.w.resize(static_cast<std::size_t>(cfg.sim.horizon));
        double sum_change = 0.0, sum_nonchange = 0.0;
        int n_change = 0, n_nonchange = 0;
        for (int t = 0; t < cfg.sim.horizon; ++t) {
            const TransportPlan plan = solve_unbalanced(
                smooth(run.empirical[static_cast<std::size_t>(t)], cfg.smooth_delta),
                run.empirical[static_cast<std::size_t>(t) + 1], cost, cfg.solver);
            res.w[static_cast<std::size_t>(t)] =
                uot_objective(plan, cost, cfg.solver.lambda);
            const double err =
                (plan.pi() - truth.plans[static_cast<std::size_t>(t)].pi()).squaredNorm();
            if (truth.change_times.count(t)) {
                sum_change += err;
                ++n_change;
            } else {
                sum_nonchange += err;
                ++n_nonchange;
            }
        }
        if (n_change > 0) res.err_change = sum_change / n_change;
        if (n_nonchange > 0) res.err_nonchange = sum_nonchange / n_nonchange;

        WSeries series{res.w, cfg.solver.lambda, 0};
        const ChangePointReport cps = detect_peaks(series, cfg.window, cfg.threshold_k);
        res.detected.insert(cps.detected.begin(), cps.detected.end());
        res.no_detection = res.detected.empty();
        if (has_changes) {
            res.metrics = score_detection(truth.change_times, res.detected);
        }
        report.runs[static_cast<std::size_t>(r)] = std::move(res);
    });

    std::vector<double> fs, errs_c, errs_n;
    double sum_p = 0.0, sum_r = 0.0;
    for (const RunResult& res : report.runs) {
        if (has_changes) {
            fs.push_back(res.metrics.f_score);
            sum_p += res.metrics.precision;
            sum_r += res.metrics.recall;
        }
        if (std::isfinite(res.err_change)) errs_c.push_back(res.err_change);
        if (std::isfinite(res.err_nonchange)) errs_n.push_back(res.err_nonchange);
        if (res.no_detection) ++report.runs_with_no_detection;
    }
    const MeanSe f = mean_se(fs);
    report.mean_f = f.mean;
    report.se_f = f.se;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.mean_precision = has_changes ? sum_p / cfg.runs : nan;
    report.mean_recall = has_changes ? sum_r / cfg.runs : nan;
    const MeanSe ec = mean_se(errs_c);
    report.mean_err_change = ec.mean;
    report.se_err_change = ec.se;
    const MeanSe en = mean_se(errs_n);
    report.mean_err_nonchange = en.mean;
    report.se_err_nonchange = en.se;
    report.single_run = cfg.runs == 1;
    return report;
}

}  // namespace celltraj
