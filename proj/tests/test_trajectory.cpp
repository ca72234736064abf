#include <cmath>
#include <vector>

#include "celltraj/trajectory.hpp"
#include "doctest.h"

using namespace celltraj;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

// Strictly positive d = 3 plan for pair t, columns summing to (0.3, 0.4, 0.3).
// The weights vary with t so consecutive transition matrices do not commute.
TransportPlan positive_plan(int t) {
    const Vector b = vec({0.3, 0.4, 0.3});
    Matrix pi(3, 3);
    for (int k = 0; k < 3; ++k) {
        double w[3], s = 0.0;
        for (int j = 0; j < 3; ++j) {
            w[j] = 1.0 + ((j + 2 * k + t) % 3);
            s += w[j];
        }
        for (int j = 0; j < 3; ++j) pi(j, k) = b[k] * w[j] / s;
    }
    return TransportPlan(std::move(pi), Marginal::uniform(3), Marginal(b));
}

TransportPlan plan2(std::initializer_list<double> entries, const Marginal& source,
                    const Marginal& target) {
    Matrix pi(2, 2);
    Eigen::Index i = 0;
    for (double e : entries) pi(i / 2, i % 2) = e, ++i;
    return TransportPlan(std::move(pi), source, target);
}

}  // namespace

TEST_SUITE("trajectory") {

TEST_CASE("forward transition divides rows by their mass") {
    const TransportPlan plan = plan2({0.2, 0.2, 0.3, 0.3}, Marginal(vec({0.45, 0.55})),
                                     Marginal(vec({0.5, 0.5})));
    const TransitionMatrix h = forward_transition(plan, 3);
    CHECK(h.direction() == Direction::forward);
    CHECK(h.source_time() == 3);
    CHECK(h.target_time() == 4);
    CHECK(h.h()(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(h.h()(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(h.h()(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(h.h()(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_FALSE(h.zero_mass()[0]);
    CHECK_FALSE(h.zero_mass()[1]);
}

TEST_CASE("backward transition divides columns by the target marginal") {
    const TransportPlan plan = plan2({0.2, 0.2, 0.3, 0.3}, Marginal(vec({0.45, 0.55})),
                                     Marginal(vec({0.5, 0.5})));
    const TransitionMatrix h = backward_transition(plan, 3);
    CHECK(h.direction() == Direction::backward);
    CHECK(h.source_time() == 4);
    CHECK(h.target_time() == 3);
    CHECK(h.h()(0, 0) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(h.h()(1, 0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(h.h()(0, 1) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(h.h()(1, 1) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("transitions recompose the plan marginals") {
    const TransportPlan plan = positive_plan(0);
    const Vector r = plan.row_marginal();

    // forward map applied to the row marginal gives the target
    const Vector fwd = forward_transition(plan, 0).h() * r;
    CHECK((fwd - plan.target().probs()).cwiseAbs().maxCoeff() <= 1e-12);

    // backward map applied to the target gives the row marginal back
    const Vector bwd = backward_transition(plan, 0).h() * plan.target().probs();
    CHECK((bwd - r).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("transition matrix validates shape, times, and stochasticity") {
    Matrix ok(2, 2);
    ok << 0.4, 0.7, 0.6, 0.3;
    CHECK_NOTHROW(TransitionMatrix(ok, Direction::forward, 0, 1, {false, false}));
    CHECK_THROWS_WITH_AS(TransitionMatrix(ok, Direction::forward, 0, 2, {false, false}),
                         doctest::Contains("advance time by one step"), InputError);
    CHECK_THROWS_WITH_AS(TransitionMatrix(ok, Direction::backward, 1, 1, {false, false}),
                         doctest::Contains("step back in time"), InputError);
    CHECK_NOTHROW(TransitionMatrix(ok, Direction::backward, 1, 0, {false, false}));

    CHECK_THROWS_WITH_AS(TransitionMatrix(Matrix(2, 3), Direction::forward, 0, 1,
                                          {false, false}),
                         doctest::Contains("square"), InputError);
    CHECK_THROWS_WITH_AS(TransitionMatrix(ok, Direction::forward, 0, 1, {false}),
                         doctest::Contains("flag count"), InputError);

    Matrix neg = ok;
    neg(0, 0) = -0.1;
    CHECK_THROWS_AS(TransitionMatrix(neg, Direction::forward, 0, 1, {false, false}),
                    InputError);

    Matrix short_col = ok;
    short_col(1, 0) = 0.5;  // column 0 now sums to 0.9
    CHECK_THROWS_WITH_AS(TransitionMatrix(short_col, Direction::forward, 0, 1,
                                          {false, false}),
                         doctest::Contains("sums to"), InputError);

    Matrix half_zero(2, 2);
    half_zero << 0.0, 1.0, 0.1, 0.0;  // flagged column 0 still carries mass
    CHECK_THROWS_WITH_AS(TransitionMatrix(half_zero, Direction::forward, 0, 1,
                                          {true, false}),
                         doctest::Contains("not all zero"), InputError);

    Matrix dead(2, 2);
    dead << 0.0, 1.0, 0.0, 0.0;
    CHECK_NOTHROW(TransitionMatrix(dead, Direction::forward, 0, 1, {true, false}));
}

TEST_CASE("empty chains return the anchor unchanged") {
    const Marginal q(vec({0.25, 0.5, 0.25}));
    const Marginal anc = ancestor_distribution({}, q);
    const Marginal des = descendant_distribution({}, q);
    for (int k = 0; k < 3; ++k) {
        CHECK(anc[k] == q[k]);
        CHECK(des[k] == q[k]);
    }
}

TEST_CASE("point-mass anchor selects one conditioning column") {
    const TransportPlan plan = positive_plan(1);
    const TransitionMatrix bwd = backward_transition(plan, 0);
    const Marginal q_anchor(vec({0.0, 1.0, 0.0}));
    const Marginal anc = ancestor_distribution({bwd}, q_anchor);
    for (int k = 0; k < 3; ++k)
        CHECK(anc[k] == doctest::Approx(bwd.h()(k, 1)).epsilon(1e-12));
}

TEST_CASE("one-step descendants of the row marginal reach the target") {
    const TransportPlan plan = positive_plan(2);
    Vector r = plan.row_marginal();
    r /= r.sum();
    const Marginal des = descendant_distribution({forward_transition(plan, 0)}, Marginal(r));
    CHECK((des.probs() - plan.target().probs()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("three-step chains compose in anchor-outward order") {
    const TransportPlan p0 = positive_plan(0);
    const TransportPlan p1 = positive_plan(1);
    const TransportPlan p2 = positive_plan(2);
    const Marginal q(vec({0.35, 0.4, 0.25}));

    // descendants from tau = 0: last step applied last
    const Marginal des = descendant_distribution(
        {forward_transition(p0, 0), forward_transition(p1, 1), forward_transition(p2, 2)}, q);
    Vector expect = forward_transition(p2, 2).h() *
                    (forward_transition(p1, 1).h() * (forward_transition(p0, 0).h() * q.probs()));
    expect /= expect.sum();
    CHECK((des.probs() - expect).cwiseAbs().maxCoeff() <= 1e-12);

    // ancestors from tau = 3: earliest step applied last
    const Marginal anc = ancestor_distribution(
        {backward_transition(p0, 0), backward_transition(p1, 1), backward_transition(p2, 2)},
        q);
    Vector back = backward_transition(p0, 0).h() *
                  (backward_transition(p1, 1).h() * (backward_transition(p2, 2).h() * q.probs()));
    back /= back.sum();
    CHECK((anc.probs() - back).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("chains reject wrong directions, breaks, and dimension mismatches") {
    const TransportPlan p0 = positive_plan(0);
    const TransportPlan p2 = positive_plan(2);

    CHECK_THROWS_WITH_AS(
        ancestor_distribution({forward_transition(p0, 0)}, Marginal::uniform(3)),
        doctest::Contains("not a backward matrix"), InputError);
    CHECK_THROWS_WITH_AS(
        descendant_distribution({backward_transition(p0, 0)}, Marginal::uniform(3)),
        doctest::Contains("not a forward matrix"), InputError);
    CHECK_THROWS_WITH_AS(
        descendant_distribution({forward_transition(p0, 0), forward_transition(p2, 2)},
                                Marginal::uniform(3)),
        doctest::Contains("chain breaks"), InputError);
    CHECK_THROWS_WITH_AS(descendant_distribution({forward_transition(p0, 0)},
                                                 Marginal::uniform(2)),
                         doctest::Contains("do not match the anchor"), InputError);
}

TEST_CASE("mass on a zero-mass conditioning type is rejected") {
    // target type 3 is extinct, so its backward column carries no information
    Matrix pi(3, 3);
    pi << 0.3, 0.1, 0.0, 0.2, 0.2, 0.0, 0.1, 0.1, 0.0;
    const TransportPlan plan(pi, Marginal::uniform(3), Marginal(vec({0.6, 0.4, 0.0})));
    const TransitionMatrix bwd = backward_transition(plan, 0);
    CHECK(bwd.zero_mass()[2]);
    CHECK_THROWS_WITH_AS(ancestor_distribution({bwd}, Marginal::uniform(3)),
                         doctest::Contains("no conditioning mass"), InputError);
    CHECK_NOTHROW(ancestor_distribution({bwd}, Marginal(vec({0.5, 0.5, 0.0}))));

    // row 2 of this plan is empty, so the forward map cannot condition on it
    Matrix flat(2, 2);
    flat << 0.5, 0.5, 0.0, 0.0;
    const TransportPlan top(flat, Marginal(vec({0.9, 0.1})), Marginal(vec({0.5, 0.5})));
    const TransitionMatrix fwd = forward_transition(top, 0);
    CHECK(fwd.zero_mass()[1]);
    CHECK_THROWS_AS(descendant_distribution({fwd}, Marginal(vec({0.0, 1.0}))), InputError);
}

TEST_CASE("path probability multiplies the conditional factors") {
    std::vector<TransitionMatrix> backward_chain;
    std::vector<TransitionMatrix> forward_chain;
    for (int u = 0; u < 3; ++u) backward_chain.push_back(backward_transition(positive_plan(u), u));
    for (int i = 0; i < 3; ++i)
        forward_chain.push_back(forward_transition(positive_plan(3 + i), 3 + i));

    const std::vector<int> states = {0, 1, 2, 1, 1, 0, 0};
    const double p = path_probability(states, 3, backward_chain, forward_chain);

    const double manual = backward_chain[0].h()(0, 1) * backward_chain[1].h()(1, 2) *
                          backward_chain[2].h()(2, 1) * forward_chain[0].h()(1, 1) *
                          forward_chain[1].h()(0, 1) * forward_chain[2].h()(0, 0);
    CHECK(p == doctest::Approx(manual).epsilon(1e-14));
    CHECK(p > 0.0);
    CHECK(p < 1.0);
}

TEST_CASE("path probabilities with a fixed anchor state sum to one") {
    std::vector<TransitionMatrix> backward_chain;
    std::vector<TransitionMatrix> forward_chain;
    for (int u = 0; u < 2; ++u) backward_chain.push_back(backward_transition(positive_plan(u), u));
    for (int i = 0; i < 2; ++i)
        forward_chain.push_back(forward_transition(positive_plan(2 + i), 2 + i));

    double total = 0.0;
    std::vector<int> states(5);
    states[2] = 1;  // anchor state fixed at the anchor time
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
                for (int e = 0; e < 3; ++e) {
                    states[0] = a;
                    states[1] = b;
                    states[3] = c;
                    states[4] = e;
                    total += path_probability(states, 2, backward_chain, forward_chain);
                }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("leaving the anchor state through a zero factor gives probability zero") {
    Matrix pi(2, 2);
    pi << 0.5, 0.0, 0.0, 0.5;  // diagonal plan: types never mix
    const TransportPlan plan(pi, Marginal::uniform(2), Marginal::uniform(2));
    const double p =
        path_probability({0, 1}, 0, {}, {forward_transition(plan, 0)});
    CHECK(p == 0.0);
    const double stay = path_probability({0, 0}, 0, {}, {forward_transition(plan, 0)});
    CHECK(stay == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single-state paths have probability one") {
    CHECK(path_probability({2}, 0, {}, {}) == 1.0);
}

TEST_CASE("path probability validates its inputs") {
    const TransportPlan plan = positive_plan(0);
    const TransitionMatrix fwd = forward_transition(plan, 0);
    const TransitionMatrix bwd = backward_transition(plan, 0);

    CHECK_THROWS_WITH_AS(path_probability({}, 0, {}, {}), doctest::Contains("no states"),
                         InputError);
    CHECK_THROWS_WITH_AS(path_probability({0, 1}, 2, {}, {fwd}),
                         doctest::Contains("outside the path"), InputError);
    CHECK_THROWS_WITH_AS(path_probability({0, 1}, 0, {}, {}),
                         doctest::Contains("forward chain must cover"), InputError);
    CHECK_THROWS_WITH_AS(path_probability({0, 1}, 1, {}, {}),
                         doctest::Contains("backward chain must cover"), InputError);
    CHECK_THROWS_WITH_AS(path_probability({0, 5}, 0, {}, {fwd}),
                         doctest::Contains("outside the type range"), InputError);
    CHECK_THROWS_WITH_AS(path_probability({0, 1}, 0, {}, {forward_transition(plan, 4)}),
                         doctest::Contains("does not cover its step"), InputError);
    CHECK_THROWS_WITH_AS(path_probability({0, 1}, 0, {}, {bwd}),
                         doctest::Contains("contains a backward matrix"), InputError);
    CHECK_THROWS_WITH_AS(path_probability({0, 1}, 1, {fwd}, {}),
                         doctest::Contains("contains a forward matrix"), InputError);
}

}  // TEST_SUITE
