#include "celltraj/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "celltraj/parallel.hpp"

namespace celltraj {

namespace {

double median_of(std::vector<double> xs) {
    std::size_t n = xs.size();
    std::sort(xs.begin(), xs.end());
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

WSeries compute_w_series(const std::vector<Marginal>& marginals, const CostMatrix& cost,
                         const SolverConfig& cfg, double smooth_delta, int threads) {
    if (marginals.size() < 2)
        throw InputError("need at least 2 time points to compute a transport cost series");
    const int pairs = static_cast<int>(marginals.size()) - 1;
    WSeries series;
    series.values.assign(static_cast<std::size_t>(pairs), 0.0);
    series.lambda = cfg.lambda;
    series.time_offset = 0;

    parallel_for(pairs, threads, [&](int t) {
        try {
            Marginal src = smooth(marginals[static_cast<std::size_t>(t)], smooth_delta);
            series.values[static_cast<std::size_t>(t)] =
                transport_cost(src, marginals[static_cast<std::size_t>(t) + 1], cost, cfg);
        } catch (const ConvergenceError& e) {
            std::ostringstream msg;
            msg << "time index " << t << ": " << e.what();
            throw ConvergenceError(msg.str(), e.iterations, e.residual);
        }
    });
    return series;
}

ChangePointReport detect_peaks(const WSeries& series, int window, double threshold_k) {
    if (window < 1) throw ConfigError("peak window must be at least 1");
    if (!(threshold_k > 0.0)) throw ConfigError("peak threshold_k must be positive");
    const std::vector<double>& w = series.values;
    const int n = static_cast<int>(w.size());
    if (n < 3) throw InputError("series has fewer than 3 values; cannot detect peaks");
    for (int t = 0; t < n; ++t)
        if (!(w[t] >= -1e-10) || !std::isfinite(w[t])) {
            std::ostringstream msg;
            msg << "series value at position " << t << " is not a valid transport cost ("
                << w[t] << ")";
            throw InputError(msg.str());
        }

    double med = median_of(w);
    std::vector<double> dev(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) dev[i] = std::abs(w[i] - med);
    double mad = 1.4826 * median_of(std::move(dev));
    double threshold = med + threshold_k * mad;

    ChangePointReport report;
    report.threshold_used = threshold;
    report.window_used = window;
    for (int t = 0; t < n; ++t) {
        if (!(w[t] > threshold)) continue;
        bool strict_max = true;
        int lo = std::max(0, t - window);
        int hi = std::min(n - 1, t + window);
        for (int u = lo; u <= hi && strict_max; ++u)
            if (u != t) strict_max = w[t] > w[u];
        if (strict_max) report.detected.push_back(series.time_offset + t);
    }
    return report;
}

DetectionMetrics score_detection(const std::set<int>& truth, const std::set<int>& detected) {
    if (truth.empty()) throw InputError("truth change-point set is empty");
    std::size_t hits = 0;
    for (int t : detected)
        if (truth.count(t)) ++hits;
    DetectionMetrics m;
    m.precision = detected.empty() ? 0.0 : static_cast<double>(hits) / detected.size();
    m.recall = static_cast<double>(hits) / truth.size();
    m.f_score = (m.precision + m.recall) > 0.0
                    ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                    : 0.0;
    return m;
}

}  // namespace celltraj
