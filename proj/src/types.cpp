#include "celltraj/types.hpp"

#include <cmath>
#include <sstream>

namespace celltraj {

Marginal::Marginal(Vector probs) : probs_(std::move(probs)) {
    if (probs_.size() == 0) throw InputError("marginal is empty");
    for (int k = 0; k < probs_.size(); ++k) {
        double p = probs_[k];
        if (!std::isfinite(p) || p < 0.0) {
            std::ostringstream msg;
            msg << "marginal entry " << k << " is invalid (" << p << ")";
            throw InputError(msg.str());
        }
    }
    double sum = probs_.sum();
    if (std::abs(sum - 1.0) > tol::kMarginalSum) {
        std::ostringstream msg;
        msg << "marginal sums to " << sum << ", expected 1 within " << tol::kMarginalSum;
        throw InputError(msg.str());
    }
}

Marginal Marginal::uniform(int d) {
    if (d < 1) throw InputError("marginal dimension must be positive");
    return Marginal(Vector::Constant(d, 1.0 / d));
}

GrowthProfile::GrowthProfile(Vector rates) : rates_(std::move(rates)) {
    if (rates_.size() == 0) throw InputError("growth profile is empty");
    for (int j = 0; j < rates_.size(); ++j) {
        double g = rates_[j];
        if (!std::isfinite(g) || g <= 0.0) {
            std::ostringstream msg;
            msg << "growth rate " << j << " is not positive (" << g << ")";
            throw InputError(msg.str());
        }
    }
}

CostMatrix::CostMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols())
        throw InputError("cost matrix must be square and nonempty");
    int d = static_cast<int>(m_.rows());
    max_entry_ = 0.0;
    for (int j = 0; j < d; ++j) {
        if (m_(j, j) != 0.0) {
            std::ostringstream msg;
            msg << "cost diagonal entry " << j << " is nonzero (" << m_(j, j) << ")";
            throw InputError(msg.str());
        }
        for (int k = 0; k < d; ++k) {
            double v = m_(j, k);
            if (!std::isfinite(v) || v < 0.0) {
                std::ostringstream msg;
                msg << "cost entry (" << j << "," << k << ") is invalid (" << v << ")";
                throw InputError(msg.str());
            }
            max_entry_ = std::max(max_entry_, v);
        }
    }
    double sym_tol = 1e-12 * std::max(1.0, max_entry_);
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k)
            if (std::abs(m_(j, k) - m_(k, j)) > sym_tol) {
                std::ostringstream msg;
                msg << "cost matrix is not symmetric at (" << j << "," << k << ")";
                throw InputError(msg.str());
            }
}

}  // namespace celltraj
