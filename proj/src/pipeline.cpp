#include "celltraj/pipeline.hpp"

#include <sstream>

#include "celltraj/changepoint.hpp"
#include "celltraj/errors.hpp"
#include "celltraj/parallel.hpp"
#include "celltraj/trajectory.hpp"

namespace celltraj {

AnalysisReport analyze_dataset(const Dataset& ds, const AnalysisOptions& opt) {
    if (ds.num_times() < 2) {
        std::ostringstream msg;
        msg << "need >= 2 time points, dataset has " << ds.num_times();
        throw InputError(msg.str());
    }
    if (ds.num_types() < 2) {
        std::ostringstream msg;
        msg << "need >= 2 cell types, dataset has " << ds.num_types();
        throw InputError(msg.str());
    }

    const std::vector<Marginal> marginals = empirical_marginals(ds);
    const CostMatrix cost =
        cost_from_centroids(compute_centroids(ds.features, ds.type_index, ds.num_types()));

    AnalysisReport report;
    report.type_labels = ds.type_labels;
    report.time_values = ds.time_values;
    report.solver = opt.solver;
    report.smooth_delta = opt.smooth_delta;
    report.window = opt.window;
    report.threshold_k = opt.threshold_k;
    report.warnings = ds.warnings;

    const int pairs = ds.num_times() - 1;
    report.pairs.resize(static_cast<std::size_t>(pairs));
    parallel_for(pairs, opt.threads, [&](int t) {
        TransportPlan plan = [&] {
            try {
                return solve_unbalanced(smooth(marginals[static_cast<std::size_t>(t)],
                                               opt.smooth_delta),
                                        marginals[static_cast<std::size_t>(t) + 1], cost,
                                        opt.solver);
            } catch (const ConvergenceError& e) {
                std::ostringstream msg;
                msg << "time index " << t << ": " << e.what();
                throw ConvergenceError(msg.str(), e.iterations, e.residual);
            }
        }();
        const TransitionMatrix forward = forward_transition(plan, t);
        const TransitionMatrix backward = backward_transition(plan, t);

        PairRecord& rec = report.pairs[static_cast<std::size_t>(t)];
        rec.t = t;
        rec.w = uot_objective(plan, cost, opt.solver.lambda);
        rec.plan = plan.pi();
        rec.forward = forward.h();
        rec.forward_zero_mass = forward.zero_mass();
        rec.backward = backward.h();
        rec.backward_zero_mass = backward.zero_mass();
    });

    WSeries series;
    series.lambda = opt.solver.lambda;
    series.values.reserve(static_cast<std::size_t>(pairs));
    for (const PairRecord& rec : report.pairs) series.values.push_back(rec.w);
    if (pairs >= 3) {
        const ChangePointReport cps = detect_peaks(series, opt.window, opt.threshold_k);
        report.detected = cps.detected;
        report.threshold_used = cps.threshold_used;
    } else {
        report.warnings.push_back(
            "W series has fewer than 3 values; change-point detection skipped");
    }
    return report;
}

}  // namespace celltraj
