#pragma once

#include "celltraj/types.hpp"

namespace celltraj {

// Entropic scaling solver configuration. epsilon is relative to the largest
// cost entry (eps = epsilon_scale * max m) so behavior is cost-scale-free.
// max_iters covers the slowest regime exercised here: the log-potential map
// contracts asymptotically at rate lambda / (lambda + eps), so lambda = 10
// with a small eps needs several hundred thousand sweeps at tol 1e-10.
struct SolverConfig {
    double lambda = 1.0;
    double epsilon_scale = 1e-3;
    int max_iters = 2000000;
    double convergence_tol = 1e-10;  // sup-norm of the log scaling change
};

struct SolveStats {
    int iterations = 0;
    double final_change = 0.0;
    bool log_domain = false;
};

// Joint probability matrix over source x target types. pi(j, k) is the mass
// leaving type j for type k. Invariants: entries >= 0, column sums match the
// target within tol::kPlanMarginal, total mass 1 within tol::kPlanMarginal.
class TransportPlan {
public:
    TransportPlan(Matrix pi, Marginal source, Marginal target);

    int dim() const { return static_cast<int>(pi_.rows()); }
    const Matrix& pi() const { return pi_; }
    const Marginal& source() const { return source_; }
    const Marginal& target() const { return target_; }
    Vector row_marginal() const { return pi_.rowwise().sum(); }

private:
    Matrix pi_;
    Marginal source_;
    Marginal target_;
};

// min <m, pi> over pi >= 0 with pi 1 = source and pi^T 1 = target (entropic
// smoothing eps). Both marginals must be strictly positive.
TransportPlan solve_balanced(const Marginal& source, const Marginal& target,
                             const CostMatrix& cost, const SolverConfig& cfg,
                             SolveStats* stats = nullptr);

// min <m, pi> + lambda KL(pi 1 || source) over pi >= 0 with pi^T 1 = target.
// The column constraint is exact; row sums are pulled toward the source by
// the KL penalty only. Source must be strictly positive (smooth it first);
// target entries may be zero, forcing the matching plan column to zero.
// The returned plan's unregularized objective exceeds the true optimum by at
// most 2 eps log d (entropy range over unit-mass plans).
TransportPlan solve_unbalanced(const Marginal& source, const Marginal& target,
                               const CostMatrix& cost, const SolverConfig& cfg,
                               SolveStats* stats = nullptr);

// <m, pi> + lambda KL(pi 1 || source): the objective without the entropic
// term. Evaluated at the optimal plan this is the transport cost statistic.
double uot_objective(const TransportPlan& plan, const CostMatrix& cost, double lambda);

// Transport cost W^lambda(source, target): solve, then evaluate the exact
// objective at the solution.
double transport_cost(const Marginal& source, const Marginal& target,
                      const CostMatrix& cost, const SolverConfig& cfg);

// Reference minimizer by exhaustive grid search over the per-column simplices
// (column sums are fixed by the target, so column k contributes d-1 free
// coordinates). d = 2 scans one full grid of the given step with the column
// endpoints included exactly; d = 3 runs an exhaustive coarse grid and then
// shrinks a +-2 step window around the argmin, halving the step until
// grid_step is reached. Supports d <= 3.
TransportPlan oracle_solve(const Marginal& source, const Marginal& target,
                           const CostMatrix& cost, double lambda, double grid_step);

}  // namespace celltraj
