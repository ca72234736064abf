#pragma once

#include <string>
#include <vector>

#include "celltraj/types.hpp"

namespace celltraj {

// Parsed snapshot table. Records keep file order; time indices are assigned
// by rank of the distinct time values; type indices follow first appearance.
struct Dataset {
    std::vector<std::string> type_labels;
    std::vector<std::string> feature_names;
    std::vector<double> time_values;  // sorted distinct
    std::vector<int> time_index;      // per record
    std::vector<int> type_index;      // per record
    Matrix features;                  // records x K
    std::vector<std::string> warnings;

    int num_times() const { return static_cast<int>(time_values.size()); }
    int num_types() const { return static_cast<int>(type_labels.size()); }
    int num_records() const { return static_cast<int>(features.rows()); }
};

// Delimited text with a mandatory header `time, cell_type, <features...>`.
// Comma or tab delimited, detected from the header line. Non-uniform gaps in
// the time values are accepted as adjacent steps with a warning.
Dataset parse_dataset(const std::string& path);

// Empirical type distribution per time index.
std::vector<Marginal> empirical_marginals(const Dataset& ds);

// Mean feature vector per type (d x K), pooled over all records. Errors if a
// type in [0, d) never appears.
Matrix compute_centroids(const Matrix& features, const std::vector<int>& types, int d);

// m_{jk} = squared euclidean distance between centroids j and k. Computed per
// unordered pair, so the matrix is symmetric to the bit.
CostMatrix cost_from_centroids(const Matrix& centroids);

}  // namespace celltraj
