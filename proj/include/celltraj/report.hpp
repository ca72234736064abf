#pragma once

#include <set>
#include <string>
#include <vector>

#include "celltraj/changepoint.hpp"
#include "celltraj/simulation.hpp"
#include "celltraj/solver.hpp"
#include "celltraj/types.hpp"

namespace celltraj {

inline constexpr int kReportSchemaVersion = 1;

// One consecutive-pair record: the coupling for times (t, t+1), its exact
// transport cost, and both conditional transition matrices. zero-mass flags
// mark conditioning types whose column is identically zero.
struct PairRecord {
    int t = 0;
    double w = 0.0;
    Matrix plan;
    Matrix forward;
    std::vector<bool> forward_zero_mass;
    Matrix backward;
    std::vector<bool> backward_zero_mass;
};

// Full analysis result plus the configuration that produced it. The thread
// count is an execution detail and deliberately not part of the report, so
// artifacts are identical for any parallelism.
struct AnalysisReport {
    std::vector<std::string> type_labels;
    std::vector<double> time_values;
    SolverConfig solver;
    double smooth_delta = kDefaultSmoothDelta;
    int window = kDefaultWindow;
    double threshold_k = kDefaultThresholdK;
    std::vector<PairRecord> pairs;  // t = 0..T-1 contiguously
    std::vector<int> detected;
    double threshold_used = 0.0;
    std::vector<std::string> warnings;
};

// JSON, schema-versioned, matrices row-major with explicit dims, numbers at
// full round-trip precision. read(write(r)) is bitwise identical on every
// numeric field.
void write_analysis_report(const AnalysisReport& report, const std::string& path);
AnalysisReport read_analysis_report(const std::string& path);

// Simulation ground-truth sidecar: exact marginals, true cost, truth plans,
// change times, and the generating configuration.
void write_truth(const SimTruth& truth, const SimConfig& cfg, const std::string& path);

// Monte Carlo summary in the same JSON conventions; per-run rows follow the
// aggregate block. Non-finite statistics serialize as null.
void write_benchmark_report(const BenchmarkReport& report, const std::string& path);
std::string benchmark_report_text(const BenchmarkReport& report);

// Change-time set from either a truth sidecar ("change_times") or an
// analysis report ("detected"); used by eval.
std::set<int> read_change_set(const std::string& path);

// Canonical names used in serialized configs and CLI flags.
std::string sine_form_name(SineForm form);
SineForm parse_sine_form(const std::string& name);
std::string reducer_name(Reducer reducer);
Reducer parse_reducer(const std::string& name);

}  // namespace celltraj
