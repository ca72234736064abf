#pragma once

#include <vector>

#include "celltraj/solver.hpp"

namespace celltraj {

enum class Direction { forward, backward };

// Conditional type distribution H^{target_time|source_time}: entry (k, j) is
// the probability of type k at target_time given type j at source_time.
// Columns sum to 1 except those flagged in zero_mass, which are all-zero
// because the conditioning type carries no mass; paths through such states
// have probability 0.
class TransitionMatrix {
public:
    TransitionMatrix(Matrix h, Direction direction, int source_time, int target_time,
                     std::vector<bool> zero_mass);

    int dim() const { return static_cast<int>(h_.rows()); }
    const Matrix& h() const { return h_; }
    Direction direction() const { return direction_; }
    int source_time() const { return source_time_; }
    int target_time() const { return target_time_; }
    const std::vector<bool>& zero_mass() const { return zero_mass_; }

private:
    Matrix h_;
    Direction direction_;
    int source_time_;
    int target_time_;
    std::vector<bool> zero_mass_;
};

// h_{kj}^{t+1|t} = pi_{jk} / (pi 1)_j: fate of type j at time t. plan is the
// coupling for the pair (t, t+1).
TransitionMatrix forward_transition(const TransportPlan& plan, int t);

// h_{kj}^{t|t+1} = pi_{kj} / q_{t+1,j}: origin of type j at time t+1.
TransitionMatrix backward_transition(const TransportPlan& plan, int t);

// Q_{s<-tau} = H^{s|s+1} ... H^{tau-1|tau} Q_tau. transitions[i] must be the
// backward matrix conditioning on time s+i+1; q_tau anchors at the last
// source time. An anchor with mass on a zero-mass column is rejected.
Marginal ancestor_distribution(const std::vector<TransitionMatrix>& transitions,
                               const Marginal& q_tau);

// Q_{tau->t} = H^{t|t-1} ... H^{tau+1|tau} Q_tau. transitions[i] must be the
// forward matrix for the step tau+i -> tau+i+1.
Marginal descendant_distribution(const std::vector<TransitionMatrix>& transitions,
                                 const Marginal& q_tau);

// Probability of the full type path states[0..T] anchored at anchor_time:
// the product of backward factors from the anchor down to 0 and forward
// factors from the anchor up to T. backward_chain[u] conditions time u+1 for
// u = 0..anchor_time-1; forward_chain[i] covers anchor_time+i ->
// anchor_time+i+1.
double path_probability(const std::vector<int>& states, int anchor_time,
                        const std::vector<TransitionMatrix>& backward_chain,
                        const std::vector<TransitionMatrix>& forward_chain);

}  // namespace celltraj
