#include "celltraj/distributions.hpp"

#include <sstream>

namespace celltraj {

Marginal empirical_marginal(const Snapshot& snap, int d) {
    if (d < 1) throw InputError("category count must be positive");
    if (snap.labels.empty()) {
        std::ostringstream msg;
        msg << "snapshot at time index " << snap.time_index << " has no cells";
        throw InputError(msg.str());
    }
    Vector counts = Vector::Zero(d);
    for (std::size_t i = 0; i < snap.labels.size(); ++i) {
        int lab = snap.labels[i];
        if (lab < 0 || lab >= d) {
            std::ostringstream msg;
            msg << "record " << i << " at time index " << snap.time_index
                << " has type index " << lab << " outside [0," << d - 1 << "]";
            throw InputError(msg.str());
        }
        counts[lab] += 1.0;
    }
    return Marginal(counts / static_cast<double>(snap.labels.size()));
}

Marginal smooth(const Marginal& q, double delta) {
    if (!(delta > 0.0)) throw ConfigError("smoothing delta must be positive");
    Vector shifted = q.probs().array() + delta;
    // Dividing by the actual sum keeps the result on the simplex exactly.
    return Marginal(shifted / shifted.sum());
}

Marginal apply_growth(const Marginal& q, const GrowthProfile& g) {
    if (q.dim() != g.dim()) {
        std::ostringstream msg;
        msg << "growth profile dimension " << g.dim()
            << " does not match marginal dimension " << q.dim();
        throw InputError(msg.str());
    }
    Vector scaled = q.probs().array() * g.rates().array();
    double total = scaled.sum();
    if (!(total > 0.0))
        throw InputError("growth map is degenerate: all scaled entries are zero");
    return Marginal(scaled / total);
}

}  // namespace celltraj
