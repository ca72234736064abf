#pragma once

#include "celltraj/dataset.hpp"
#include "celltraj/report.hpp"

namespace celltraj {

struct AnalysisOptions {
    SolverConfig solver;
    double smooth_delta = kDefaultSmoothDelta;
    int window = kDefaultWindow;
    double threshold_k = kDefaultThresholdK;
    int threads = 1;
};

// Full analysis of a parsed dataset: empirical marginals, pooled centroid
// costs, one coupling per consecutive pair (solved once and reused for the
// transport cost and both transition matrices), then peak detection on the
// W series. Pairs solve in parallel under opt.threads with indexed result
// slots, so the report is identical for any thread count.
AnalysisReport analyze_dataset(const Dataset& ds, const AnalysisOptions& opt);

}  // namespace celltraj
