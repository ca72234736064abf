#pragma once

#include <set>
#include <vector>

#include "celltraj/distributions.hpp"
#include "celltraj/solver.hpp"

namespace celltraj {

// Peak detector defaults. The threshold multiplier was calibrated on the
// simulation benchmark so that growth-only trajectories stay silent while
// injected changes spike orders of magnitude above the baseline; see README.
inline constexpr int kDefaultWindow = 2;
inline constexpr double kDefaultThresholdK = 6.0;

// Transport cost statistics for consecutive time-point pairs. values[i] is
// W at time time_offset + i.
struct WSeries {
    std::vector<double> values;
    double lambda = 1.0;
    int time_offset = 0;
};

struct ChangePointReport {
    std::vector<int> detected;  // sorted time indices
    double threshold_used = 0.0;
    int window_used = 0;
};

struct DetectionMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
};

// W_t = W^lambda(Q_t, Q_{t+1}) for every consecutive pair. Each pair's source
// is smoothed with smooth_delta before solving; targets are used as-is (zero
// target entries force zero plan columns). Pairs solve independently, so
// threads > 1 splits them; results land in indexed slots and are identical
// for any thread count. Solver failures rethrow with the time index attached.
WSeries compute_w_series(const std::vector<Marginal>& marginals, const CostMatrix& cost,
                         const SolverConfig& cfg, double smooth_delta = kDefaultSmoothDelta,
                         int threads = 1);

// t is detected iff values[t] is the strict maximum of the window
// values[t-window .. t+window] (truncated at the edges) and exceeds
// median + threshold_k * MAD, with MAD scaled by 1.4826.
ChangePointReport detect_peaks(const WSeries& series, int window = kDefaultWindow,
                               double threshold_k = kDefaultThresholdK);

// precision = |truth & detected| / |detected|, recall = |truth & detected| /
// |truth|, F = harmonic mean; empty detected set scores 0 by convention.
DetectionMetrics score_detection(const std::set<int>& truth, const std::set<int>& detected);

}  // namespace celltraj
