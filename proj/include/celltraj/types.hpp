#pragma once

#include <Eigen/Core>

#include <vector>

#include "celltraj/errors.hpp"

namespace celltraj {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace tol {
// Simplex membership for marginals.
inline constexpr double kMarginalSum = 1e-12;
// Plan marginal constraints (column sums, total mass).
inline constexpr double kPlanMarginal = 1e-8;
// Transition matrix column stochasticity.
inline constexpr double kTransitionColumn = 1e-10;
}  // namespace tol

// Probability vector over the d cell types at one time point.
// Invariants: every entry >= 0, entries sum to 1 within tol::kMarginalSum.
class Marginal {
public:
    explicit Marginal(Vector probs);

    int dim() const { return static_cast<int>(probs_.size()); }
    const Vector& probs() const { return probs_; }
    double operator[](int k) const { return probs_[k]; }
    bool strictly_positive() const { return (probs_.array() > 0.0).all(); }

    static Marginal uniform(int d);

private:
    Vector probs_;
};

// One observed time point: a 0-based type index per cell.
struct Snapshot {
    int time_index = 0;
    std::vector<int> labels;
};

// Per-type positive growth multipliers for one time step.
class GrowthProfile {
public:
    explicit GrowthProfile(Vector rates);

    int dim() const { return static_cast<int>(rates_.size()); }
    const Vector& rates() const { return rates_; }

private:
    Vector rates_;
};

// Cost of moving one unit of mass between types. Square, nonnegative,
// symmetric, zero diagonal.
class CostMatrix {
public:
    explicit CostMatrix(Matrix m);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& m() const { return m_; }
    double max_entry() const { return max_entry_; }

private:
    Matrix m_;
    double max_entry_;
};

}  // namespace celltraj
