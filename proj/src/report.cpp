#include "celltraj/report.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "celltraj/errors.hpp"
#include "celltraj/rng.hpp"
#include "json.hpp"

namespace celltraj {

namespace {

using Json = nlohmann::ordered_json;

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Matrix json_to_matrix(const Json& j, const char* what) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const Json& data = j.at("data");
    if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows)) {
        std::ostringstream msg;
        msg << what << ": declared " << rows << " rows, data has " << data.size();
        throw InputError(msg.str());
    }
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Json& row = data[static_cast<std::size_t>(i)];
        if (row.size() != static_cast<std::size_t>(cols)) {
            std::ostringstream msg;
            msg << what << ": row " << i << " has " << row.size() << " entries, expected "
                << cols;
            throw InputError(msg.str());
        }
        for (Eigen::Index k = 0; k < cols; ++k) {
            m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
        }
    }
    return m;
}

double json_to_double(const Json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

Json solver_to_json(const SolverConfig& cfg) {
    return Json{{"lambda", cfg.lambda},
                {"epsilon_scale", cfg.epsilon_scale},
                {"max_iters", cfg.max_iters},
                {"convergence_tol", cfg.convergence_tol}};
}

SolverConfig json_to_solver(const Json& j) {
    SolverConfig cfg;
    cfg.lambda = j.at("lambda").get<double>();
    cfg.epsilon_scale = j.at("epsilon_scale").get<double>();
    cfg.max_iters = j.at("max_iters").get<int>();
    cfg.convergence_tol = j.at("convergence_tol").get<double>();
    return cfg;
}

Json sim_to_json(const SimConfig& cfg) {
    return Json{{"d", cfg.d},
                {"horizon", cfg.horizon},
                {"genes", cfg.genes},
                {"cells", cfg.cells},
                {"nu", cfg.nu},
                {"eta", cfg.eta},
                {"change_times", cfg.change_times},
                {"seed", cfg.seed},
                {"sine_form", sine_form_name(cfg.sine_form)},
                {"reducer", reducer_name(cfg.reducer)},
                {"rng", std::string(kRngName) + "/v" + std::to_string(kRngVersion)}};
}

void dump_to_file(const Json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot open output file for writing: " + path);
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw InputError("failed while writing: " + path);
    }
}

Json parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open file: " + path);
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("cannot parse " + path + ": " + e.what());
    }
}

void check_schema(const Json& j, const char* expected_kind, const std::string& path) {
    if (!j.is_object() || !j.contains("schema_version") || !j.contains("kind")) {
        throw InputError(path + ": not a report file (missing schema_version / kind)");
    }
    const int version = j.at("schema_version").get<int>();
    if (version != kReportSchemaVersion) {
        std::ostringstream msg;
        msg << path << ": schema version " << version << " unsupported; this build reads "
            << "version " << kReportSchemaVersion;
        throw InputError(msg.str());
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind != expected_kind) {
        throw InputError(path + ": expected a " + expected_kind + " file, found kind '" +
                         kind + "'");
    }
}

}  // namespace

std::string sine_form_name(SineForm form) {
    return form == SineForm::pi_inside ? "pi-inside" : "pi-outside";
}

SineForm parse_sine_form(const std::string& name) {
    if (name == "pi-inside") return SineForm::pi_inside;
    if (name == "pi-outside") return SineForm::pi_outside;
    throw ConfigError("unknown sine form '" + name + "' (choose pi-inside or pi-outside)");
}

std::string reducer_name(Reducer reducer) {
    return reducer == Reducer::principal_axes ? "principal-axes" : "identity";
}

Reducer parse_reducer(const std::string& name) {
    if (name == "principal-axes") return Reducer::principal_axes;
    if (name == "identity") return Reducer::identity;
    throw ConfigError("unknown reducer '" + name + "' (choose principal-axes or identity)");
}

void write_analysis_report(const AnalysisReport& report, const std::string& path) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["kind"] = "analysis";
    j["type_labels"] = report.type_labels;
    j["time_values"] = report.time_values;
    j["config"] = Json{{"solver", solver_to_json(report.solver)},
                       {"smooth_delta", report.smooth_delta},
                       {"window", report.window},
                       {"threshold_k", report.threshold_k}};
    Json pairs = Json::array();
    for (const PairRecord& p : report.pairs) {
        pairs.push_back(Json{{"t", p.t},
                             {"w", p.w},
                             {"plan", matrix_to_json(p.plan)},
                             {"forward", matrix_to_json(p.forward)},
                             {"forward_zero_mass", p.forward_zero_mass},
                             {"backward", matrix_to_json(p.backward)},
                             {"backward_zero_mass", p.backward_zero_mass}});
    }
    j["pairs"] = std::move(pairs);
    j["detected"] = report.detected;
    j["threshold_used"] = report.threshold_used;
    j["warnings"] = report.warnings;
    dump_to_file(j, path);
}

AnalysisReport read_analysis_report(const std::string& path) {
    const Json j = parse_file(path);
    check_schema(j, "analysis", path);
    try {
        AnalysisReport report;
        report.type_labels = j.at("type_labels").get<std::vector<std::string>>();
        report.time_values = j.at("time_values").get<std::vector<double>>();
        const Json& cfg = j.at("config");
        report.solver = json_to_solver(cfg.at("solver"));
        report.smooth_delta = cfg.at("smooth_delta").get<double>();
        report.window = cfg.at("window").get<int>();
        report.threshold_k = cfg.at("threshold_k").get<double>();
        const Json& pairs = j.at("pairs");
        report.pairs.reserve(pairs.size());
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const Json& p = pairs[i];
            PairRecord rec;
            rec.t = p.at("t").get<int>();
            if (rec.t != static_cast<int>(i)) {
                std::ostringstream msg;
                msg << path << ": pair " << i << " has t = " << rec.t
                    << "; pairs must cover 0..T-1 contiguously";
                throw InputError(msg.str());
            }
            rec.w = json_to_double(p.at("w"));
            rec.plan = json_to_matrix(p.at("plan"), "plan");
            rec.forward = json_to_matrix(p.at("forward"), "forward");
            rec.forward_zero_mass = p.at("forward_zero_mass").get<std::vector<bool>>();
            rec.backward = json_to_matrix(p.at("backward"), "backward");
            rec.backward_zero_mass = p.at("backward_zero_mass").get<std::vector<bool>>();
            report.pairs.push_back(std::move(rec));
        }
        report.detected = j.at("detected").get<std::vector<int>>();
        report.threshold_used = json_to_double(j.at("threshold_used"));
        report.warnings = j.at("warnings").get<std::vector<std::string>>();
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": malformed analysis report: " + e.what());
    }
}

void write_truth(const SimTruth& truth, const SimConfig& cfg, const std::string& path) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["kind"] = "truth";
    j["config"] = sim_to_json(cfg);
    j["change_times"] = std::vector<int>(truth.change_times.begin(), truth.change_times.end());
    Matrix marginals(static_cast<Eigen::Index>(truth.marginals.size()), cfg.d);
    for (std::size_t t = 0; t < truth.marginals.size(); ++t) {
        marginals.row(static_cast<Eigen::Index>(t)) = truth.marginals[t].probs().transpose();
    }
    j["marginals"] = matrix_to_json(marginals);
    j["cost"] = matrix_to_json(truth.cost.m());
    Json plans = Json::array();
    for (const TransportPlan& plan : truth.plans) plans.push_back(matrix_to_json(plan.pi()));
    j["plans"] = std::move(plans);
    dump_to_file(j, path);
}

void write_benchmark_report(const BenchmarkReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot open output file for writing: " + path);
    }
    out << benchmark_report_text(report);
    if (!out) {
        throw InputError("failed while writing: " + path);
    }
}

std::string benchmark_report_text(const BenchmarkReport& report) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["kind"] = "benchmark";
    j["config"] = Json{{"sim", sim_to_json(report.config.sim)},
                       {"solver", solver_to_json(report.config.solver)},
                       {"smooth_delta", report.config.smooth_delta},
                       {"window", report.config.window},
                       {"threshold_k", report.config.threshold_k},
                       {"runs", report.config.runs}};
    j["summary"] = Json{{"mean_f", report.mean_f},
                        {"se_f", report.se_f},
                        {"mean_precision", report.mean_precision},
                        {"mean_recall", report.mean_recall},
                        {"mean_err_change", report.mean_err_change},
                        {"se_err_change", report.se_err_change},
                        {"mean_err_nonchange", report.mean_err_nonchange},
                        {"se_err_nonchange", report.se_err_nonchange},
                        {"runs_with_no_detection", report.runs_with_no_detection},
                        {"single_run", report.single_run}};
    Json runs = Json::array();
    for (const RunResult& res : report.runs) {
        runs.push_back(Json{{"detected", std::vector<int>(res.detected.begin(), res.detected.end())},
                            {"precision", res.metrics.precision},
                            {"recall", res.metrics.recall},
                            {"f_score", res.metrics.f_score},
                            {"err_change", res.err_change},
                            {"err_nonchange", res.err_nonchange},
                            {"no_detection", res.no_detection}});
    }
    j["per_run"] = std::move(runs);
    return j.dump(2) + '\n';
}

std::set<int> read_change_set(const std::string& path) {
    const Json j = parse_file(path);
    const char* field = nullptr;
    if (j.is_object() && j.contains("change_times")) {
        field = "change_times";
    } else if (j.is_object() && j.contains("detected")) {
        field = "detected";
    } else {
        throw InputError(path + ": no change_times or detected field");
    }
    try {
        const auto values = j.at(field).get<std::vector<int>>();
        return {values.begin(), values.end()};
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": malformed " + field + " field: " + e.what());
    }
}

}  // namespace celltraj
