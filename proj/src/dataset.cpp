#include "celltraj/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "celltraj/errors.hpp"

namespace celltraj {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

double parse_number(const std::string& field, int line_no, const char* what) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto res = std::from_chars(first, last, value);
    if (field.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << "line " << line_no << ": cannot parse " << what << " '" << field << "'";
        throw InputError(msg.str());
    }
    return value;
}

}  // namespace

Dataset parse_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open dataset file: " + path);
    }

    std::string line;
    if (!std::getline(in, line)) {
        throw InputError("dataset file is empty: " + path);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const char delim = line.find('\t') != std::string::npos ? '\t' : ',';

    std::vector<std::string> header = split_fields(line, delim);
    if (header.size() < 3 || header[0] != "time" || header[1] != "cell_type") {
        throw InputError(
            "line 1: header must be 'time" + std::string(1, delim) + "cell_type" +
            std::string(1, delim) + "<feature>...' with at least one feature column");
    }

    Dataset ds;
    ds.feature_names.assign(header.begin() + 2, header.end());
    const int width = static_cast<int>(ds.feature_names.size());

    std::vector<double> raw_times;
    std::vector<double> raw_features;
    std::unordered_map<std::string, int> type_lookup;

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;

        std::vector<std::string> fields = split_fields(line, delim);
        if (static_cast<int>(fields.size()) != width + 2) {
            std::ostringstream msg;
            msg << "line " << line_no << ": expected " << width + 2 << " fields, found "
                << fields.size();
            throw InputError(msg.str());
        }

        raw_times.push_back(parse_number(fields[0], line_no, "time value"));

        const std::string& label = fields[1];
        if (label.empty()) {
            std::ostringstream msg;
            msg << "line " << line_no << ": empty cell_type label";
            throw InputError(msg.str());
        }
        auto [it, inserted] = type_lookup.try_emplace(label, static_cast<int>(ds.type_labels.size()));
        if (inserted) ds.type_labels.push_back(label);
        ds.type_index.push_back(it->second);

        for (int j = 0; j < width; ++j) {
            raw_features.push_back(parse_number(fields[2 + j], line_no, "feature value"));
        }
    }

    if (raw_times.empty()) {
        throw InputError("dataset has a header but no records: " + path);
    }

    std::vector<double> distinct = raw_times;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    ds.time_values = distinct;

    std::unordered_map<double, int> time_lookup;
    for (std::size_t i = 0; i < distinct.size(); ++i) {
        time_lookup.emplace(distinct[i], static_cast<int>(i));
    }
    ds.time_index.resize(raw_times.size());
    for (std::size_t i = 0; i < raw_times.size(); ++i) {
        ds.time_index[i] = time_lookup.at(raw_times[i]);
    }

    if (distinct.size() >= 3) {
        const double step = distinct[1] - distinct[0];
        for (std::size_t i = 2; i < distinct.size(); ++i) {
            const double gap = distinct[i] - distinct[i - 1];
            if (std::abs(gap - step) > 1e-9 * std::max(std::abs(step), std::abs(gap))) {
                ds.warnings.push_back(
                    "time values are not uniformly spaced; consecutive distinct values are "
                    "treated as adjacent steps");
                break;
            }
        }
    }

    const int records = static_cast<int>(raw_times.size());
    ds.features.resize(records, width);
    for (int i = 0; i < records; ++i) {
        for (int j = 0; j < width; ++j) {
            ds.features(i, j) = raw_features[static_cast<std::size_t>(i) * width + j];
        }
    }
    return ds;
}

std::vector<Marginal> empirical_marginals(const Dataset& ds) {
    const int d = ds.num_types();
    const int times = ds.num_times();
    std::vector<Vector> counts(times, Vector::Zero(d));
    for (int i = 0; i < ds.num_records(); ++i) {
        counts[ds.time_index[i]][ds.type_index[i]] += 1.0;
    }
    std::vector<Marginal> out;
    out.reserve(times);
    for (int t = 0; t < times; ++t) {
        out.emplace_back(counts[t] / counts[t].sum());
    }
    return out;
}

Matrix compute_centroids(const Matrix& features, const std::vector<int>& types, int d) {
    if (d < 1) {
        throw InputError("centroid computation needs d >= 1 types");
    }
    if (features.rows() != static_cast<Eigen::Index>(types.size())) {
        std::ostringstream msg;
        msg << "feature rows (" << features.rows() << ") do not match type assignments ("
            << types.size() << ")";
        throw InputError(msg.str());
    }

    Matrix centroids = Matrix::Zero(d, features.cols());
    std::vector<long> counts(d, 0);
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        const int j = types[static_cast<std::size_t>(i)];
        if (j < 0 || j >= d) {
            std::ostringstream msg;
            msg << "record " << i << " has type index " << j << " outside [0, " << d - 1 << "]";
            throw InputError(msg.str());
        }
        centroids.row(j) += features.row(i);
        ++counts[j];
    }

    std::vector<int> missing;
    for (int j = 0; j < d; ++j) {
        if (counts[j] == 0) missing.push_back(j);
    }
    if (!missing.empty()) {
        std::ostringstream msg;
        msg << "no cells observed for type index";
        msg << (missing.size() > 1 ? "es " : " ");
        for (std::size_t i = 0; i < missing.size(); ++i) {
            if (i > 0) msg << ", ";
            msg << missing[i];
        }
        msg << "; cannot compute centroids";
        throw InputError(msg.str());
    }

    for (int j = 0; j < d; ++j) {
        centroids.row(j) /= static_cast<double>(counts[j]);
    }
    return centroids;
}

CostMatrix cost_from_centroids(const Matrix& centroids) {
    const int d = static_cast<int>(centroids.rows());
    if (d < 2) {
        throw InputError("cost matrix needs at least 2 centroids");
    }
    Matrix m = Matrix::Zero(d, d);
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            const double dist2 = (centroids.row(j) - centroids.row(k)).squaredNorm();
            m(j, k) = dist2;
            m(k, j) = dist2;
        }
    }
    return CostMatrix(m);
}

}  // namespace celltraj
