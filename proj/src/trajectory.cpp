#include "celltraj/trajectory.hpp"

#include <cmath>
#include <sstream>

namespace celltraj {

namespace {

// Mass below this is treated as absent when checking anchors against
// zero-mass columns.
constexpr double kMassFloor = 1e-12;

}  // namespace

TransitionMatrix::TransitionMatrix(Matrix h, Direction direction, int source_time,
                                   int target_time, std::vector<bool> zero_mass)
    : h_(std::move(h)),
      direction_(direction),
      source_time_(source_time),
      target_time_(target_time),
      zero_mass_(std::move(zero_mass)) {
    const int d = static_cast<int>(h_.rows());
    if (d == 0 || h_.cols() != d)
        throw InputError("transition matrix must be square and nonempty");
    if (static_cast<int>(zero_mass_.size()) != d)
        throw InputError("zero_mass flag count does not match the matrix dimension");
    if (direction_ == Direction::forward && target_time_ != source_time_ + 1)
        throw InputError("forward transition must advance time by one step");
    if (direction_ == Direction::backward && target_time_ != source_time_ - 1)
        throw InputError("backward transition must step back in time by one step");
    for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) {
            double v = h_(k, j);
            if (!std::isfinite(v) || v < 0.0) {
                std::ostringstream msg;
                msg << "transition entry (" << k << "," << j << ") is invalid (" << v << ")";
                throw InputError(msg.str());
            }
            s += v;
        }
        if (zero_mass_[j]) {
            if (s != 0.0) {
                std::ostringstream msg;
                msg << "zero-mass column " << j << " of the transition matrix is not all zero";
                throw InputError(msg.str());
            }
        } else if (std::abs(s - 1.0) > tol::kTransitionColumn) {
            std::ostringstream msg;
            msg << "transition column " << j << " sums to " << s << ", expected 1";
            throw InputError(msg.str());
        }
    }
}

TransitionMatrix forward_transition(const TransportPlan& plan, int t) {
    const int d = plan.dim();
    Vector r = plan.row_marginal();
    Matrix h = Matrix::Zero(d, d);
    std::vector<bool> zero(d, false);
    for (int j = 0; j < d; ++j) {
        if (r[j] <= 0.0) { zero[j] = true; continue; }
        for (int k = 0; k < d; ++k) h(k, j) = plan.pi()(j, k) / r[j];
    }
    return TransitionMatrix(std::move(h), Direction::forward, t, t + 1, std::move(zero));
}

TransitionMatrix backward_transition(const TransportPlan& plan, int t) {
    const int d = plan.dim();
    const Vector& q_next = plan.target().probs();
    Matrix h = Matrix::Zero(d, d);
    std::vector<bool> zero(d, false);
    for (int j = 0; j < d; ++j) {
        if (q_next[j] <= 0.0) { zero[j] = true; continue; }
        // Column sums are exact against the target, so these columns are
        // stochastic to rounding.
        for (int k = 0; k < d; ++k) h(k, j) = plan.pi()(k, j) / q_next[j];
    }
    return TransitionMatrix(std::move(h), Direction::backward, t + 1, t, std::move(zero));
}

namespace {

Marginal compose_chain(const std::vector<TransitionMatrix>& transitions, const Marginal& q_tau,
                       Direction expected) {
    if (transitions.empty()) return q_tau;
    const char* kind = expected == Direction::backward ? "backward" : "forward";
    const int d = q_tau.dim();
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        const TransitionMatrix& tm = transitions[i];
        if (tm.direction() != expected) {
            std::ostringstream msg;
            msg << "transition " << i << " is not a " << kind << " matrix";
            throw InputError(msg.str());
        }
        if (tm.dim() != d)
            throw InputError("transition dimensions do not match the anchor marginal");
        if (i + 1 < transitions.size()) {
            const TransitionMatrix& next = transitions[i + 1];
            bool contiguous = expected == Direction::backward
                                  ? next.target_time() == tm.source_time()
                                  : next.source_time() == tm.target_time();
            if (!contiguous) {
                std::ostringstream msg;
                msg << "transition chain breaks between elements " << i << " and " << i + 1;
                throw InputError(msg.str());
            }
        }
    }

    Vector v = q_tau.probs();
    // The anchor sits at the conditioning side: the last element of a
    // backward chain, the first of a forward one. Apply from the anchor
    // outward.
    auto apply = [&](const TransitionMatrix& tm) {
        for (int j = 0; j < tm.dim(); ++j)
            if (tm.zero_mass()[j] && v[j] > kMassFloor) {
                std::ostringstream msg;
                msg << "mass " << v[j] << " reaches type " << j << " at time "
                    << tm.source_time() << ", which has no conditioning mass";
                throw InputError(msg.str());
            }
        v = tm.h() * v;
    };
    if (expected == Direction::backward) {
        for (std::size_t idx = transitions.size(); idx-- > 0;) apply(transitions[idx]);
    } else {
        for (const TransitionMatrix& tm : transitions) apply(tm);
    }
    // Column stochasticity is only tol-tight, so a long chain can drift the
    // sum past the Marginal tolerance; pull the result back onto the simplex.
    v /= v.sum();
    return Marginal(std::move(v));
}

}  // namespace

Marginal ancestor_distribution(const std::vector<TransitionMatrix>& transitions,
                               const Marginal& q_tau) {
    return compose_chain(transitions, q_tau, Direction::backward);
}

Marginal descendant_distribution(const std::vector<TransitionMatrix>& transitions,
                                 const Marginal& q_tau) {
    return compose_chain(transitions, q_tau, Direction::forward);
}

double path_probability(const std::vector<int>& states, int anchor_time,
                        const std::vector<TransitionMatrix>& backward_chain,
                        const std::vector<TransitionMatrix>& forward_chain) {
    if (states.empty()) throw InputError("path has no states");
    const int horizon = static_cast<int>(states.size()) - 1;
    if (anchor_time < 0 || anchor_time > horizon)
        throw InputError("anchor time lies outside the path");
    if (static_cast<int>(backward_chain.size()) != anchor_time)
        throw InputError("backward chain must cover every step before the anchor");
    if (static_cast<int>(forward_chain.size()) != horizon - anchor_time)
        throw InputError("forward chain must cover every step after the anchor");

    int d = 0;
    if (!backward_chain.empty()) d = backward_chain.front().dim();
    else if (!forward_chain.empty()) d = forward_chain.front().dim();
    else return 1.0;  // single-state path, anchored at itself

    for (int s : states)
        if (s < 0 || s >= d) throw InputError("path state index outside the type range");

    for (int u = 0; u < anchor_time; ++u) {
        const TransitionMatrix& tm = backward_chain[u];
        if (tm.direction() != Direction::backward)
            throw InputError("backward chain contains a forward matrix");
        if (tm.target_time() != u || tm.dim() != d)
            throw InputError("backward chain element does not cover its step");
    }
    for (int i = 0; i < horizon - anchor_time; ++i) {
        const TransitionMatrix& tm = forward_chain[i];
        if (tm.direction() != Direction::forward)
            throw InputError("forward chain contains a backward matrix");
        if (tm.source_time() != anchor_time + i || tm.dim() != d)
            throw InputError("forward chain element does not cover its step");
    }

    double p = 1.0;
    // P(X_u = states[u] | X_{u+1} = states[u+1]) going down from the anchor.
    for (int u = anchor_time - 1; u >= 0; --u)
        p *= backward_chain[u].h()(states[u], states[u + 1]);
    // P(X_{u+1} = states[u+1] | X_u = states[u]) going up from the anchor.
    for (int u = anchor_time; u < horizon; ++u)
        p *= forward_chain[u - anchor_time].h()(states[u + 1], states[u]);
    return p;
}

}  // namespace celltraj
