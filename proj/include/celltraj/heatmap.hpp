#pragma once

#include <string>
#include <vector>

#include "celltraj/solver.hpp"

namespace celltraj {

// SVG heatmap of a transport plan: one colored cell per pi_{jk} on a
// white-to-dark-blue monotone ramp, source labels down the left, target
// labels across the top, and marginal bar strips (plan row sums on the left,
// target on top). Output depends only on the inputs; labels must have one
// entry per type.
std::string render_heatmap(const TransportPlan& plan, const std::vector<std::string>& labels);

void write_heatmap(const TransportPlan& plan, const std::vector<std::string>& labels,
                   const std::string& path);

}  // namespace celltraj
