#include "celltraj/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace celltraj {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Scaling components outside this range force the log-domain path.
constexpr double kDomainLo = 1e-100;
constexpr double kDomainHi = 1e100;

void check_config(const SolverConfig& cfg) {
    if (!(cfg.lambda > 0.0)) throw ConfigError("solver lambda must be positive");
    if (!(cfg.epsilon_scale > 0.0)) throw ConfigError("solver epsilon_scale must be positive");
    if (cfg.max_iters < 1) throw ConfigError("solver max_iters must be at least 1");
    if (!(cfg.convergence_tol > 0.0)) throw ConfigError("solver convergence_tol must be positive");
}

void check_inputs(const Marginal& source, const Marginal& target, const CostMatrix& cost,
                  bool target_positive) {
    if (source.dim() != target.dim())
        throw InputError("source and target marginals have different dimensions");
    if (cost.dim() != source.dim())
        throw InputError("cost matrix dimension does not match the marginals");
    if (!source.strictly_positive())
        throw InputError("source marginal has zero entries; smooth it before solving");
    if (target_positive && !target.strictly_positive())
        throw InputError("balanced solve requires a strictly positive target marginal");
}

[[noreturn]] void fail_convergence(int iters, double change, double tol) {
    std::ostringstream msg;
    msg << "scaling solver did not converge: " << iters << " iterations, last log change "
        << change << ", tolerance " << tol;
    throw ConvergenceError(msg.str(), iters, change);
}

// One Sinkhorn-type scaling solve. phi = 1 recovers the balanced iteration;
// phi = lambda / (lambda + eps) is the KL-relaxed row update. Runs in the
// standard domain until a scaling component leaves [kDomainLo, kDomainHi] or
// goes non-finite, then permanently in the log domain.
Matrix run_scaling(const Vector& a, const Vector& b, const Matrix& m, double eps, double phi,
                   const SolverConfig& cfg, SolveStats* stats) {
    const int d = static_cast<int>(a.size());
    const double tolc = cfg.convergence_tol;

    bool converged = false;
    bool log_phase = false;
    int iter = 0;
    double change = kInf;

    Vector u = Vector::Ones(d);
    Vector v(d);
    for (int k = 0; k < d; ++k) v[k] = b[k] > 0.0 ? 1.0 : 0.0;
    // Gibbs kernel; entries for huge costs underflow to exact 0, which the
    // log phase handles if the standard fixed point needs them.
    Matrix K = (-m.array() / eps).exp();

    while (iter < cfg.max_iters) {
        ++iter;
        Vector Kv = K * v;
        bool bad = false;
        for (int j = 0; j < d && !bad; ++j)
            bad = !(Kv[j] > 0.0) || !std::isfinite(Kv[j]);
        if (bad) { log_phase = true; --iter; break; }

        Vector un(d);
        for (int j = 0; j < d; ++j) {
            double ratio = a[j] / Kv[j];
            un[j] = phi == 1.0 ? ratio : std::pow(ratio, phi);
        }
        Vector Ktu = K.transpose() * un;
        Vector vn(d);
        for (int k = 0; k < d; ++k)
            vn[k] = b[k] > 0.0 ? b[k] / Ktu[k] : 0.0;

        bool in_domain = true;
        for (int j = 0; j < d && in_domain; ++j)
            in_domain = std::isfinite(un[j]) && un[j] >= kDomainLo && un[j] <= kDomainHi;
        for (int k = 0; k < d && in_domain; ++k)
            if (b[k] > 0.0)
                in_domain = std::isfinite(vn[k]) && vn[k] >= kDomainLo && vn[k] <= kDomainHi;
        if (!in_domain) { log_phase = true; --iter; break; }

        change = 0.0;
        for (int j = 0; j < d; ++j)
            change = std::max(change, std::abs(std::log(un[j] / u[j])));
        for (int k = 0; k < d; ++k)
            if (b[k] > 0.0) change = std::max(change, std::abs(std::log(vn[k] / v[k])));
        u = un;
        v = vn;
        if (change < tolc) { converged = true; break; }
    }

    Vector f(d), g(d);
    if (log_phase) {
        // Seed the log phase from the last in-range scalings.
        for (int j = 0; j < d; ++j) f[j] = eps * std::log(u[j]);
        for (int k = 0; k < d; ++k) g[k] = b[k] > 0.0 ? eps * std::log(v[k]) : -kInf;

        Vector eps_log_a(d), eps_log_b(d);
        for (int j = 0; j < d; ++j) eps_log_a[j] = eps * std::log(a[j]);
        for (int k = 0; k < d; ++k) eps_log_b[k] = b[k] > 0.0 ? eps * std::log(b[k]) : -kInf;

        // eps * log sum_i exp(x_i / eps) with a running max shift; -inf terms
        // drop out of the sum.
        auto lse = [&](auto&& term, int count) {
            double mx = -kInf;
            for (int i = 0; i < count; ++i) mx = std::max(mx, term(i));
            double s = 0.0;
            for (int i = 0; i < count; ++i) {
                double x = term(i);
                if (x > -kInf) s += std::exp((x - mx) / eps);
            }
            return mx + eps * std::log(s);
        };

        Vector fn(d), gn(d);
        while (iter < cfg.max_iters) {
            ++iter;
            for (int j = 0; j < d; ++j) {
                double l = lse([&](int k) { return g[k] - m(j, k); }, d);
                fn[j] = phi * (eps_log_a[j] - l);
            }
            for (int k = 0; k < d; ++k) {
                if (b[k] <= 0.0) { gn[k] = -kInf; continue; }
                double l = lse([&](int j) { return fn[j] - m(j, k); }, d);
                gn[k] = eps_log_b[k] - l;
            }
            change = 0.0;
            for (int j = 0; j < d; ++j)
                change = std::max(change, std::abs(fn[j] - f[j]) / eps);
            for (int k = 0; k < d; ++k)
                if (b[k] > 0.0) change = std::max(change, std::abs(gn[k] - g[k]) / eps);
            f = fn;
            g = gn;
            if (change < tolc) { converged = true; break; }
        }
    }

    if (!converged) fail_convergence(iter, change, tolc);

    Matrix pi(d, d);
    if (log_phase) {
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                pi(j, k) = b[k] > 0.0 ? std::exp((f[j] + g[k] - m(j, k)) / eps) : 0.0;
    } else {
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                pi(j, k) = b[k] > 0.0 ? u[j] * K(j, k) * v[k] : 0.0;
    }

    // Project exactly onto the column constraint; the scaling already matches
    // it to rounding, so the factors are 1 + O(ulp).
    for (int k = 0; k < d; ++k) {
        if (b[k] <= 0.0) continue;
        double s = pi.col(k).sum();
        if (!(s > 0.0) || !std::isfinite(s))
            fail_convergence(iter, change, tolc);
        pi.col(k) *= b[k] / s;
    }

    if (stats) {
        stats->iterations = iter;
        stats->final_change = change;
        stats->log_domain = log_phase;
    }
    return pi;
}

double resolve_epsilon(const CostMatrix& cost, const SolverConfig& cfg) {
    // A zero cost matrix degenerates the kernel to all-ones; any positive eps
    // yields the same fixed point there.
    double scale = cost.max_entry() > 0.0 ? cost.max_entry() : 1.0;
    return cfg.epsilon_scale * scale;
}

}  // namespace

TransportPlan::TransportPlan(Matrix pi, Marginal source, Marginal target)
    : pi_(std::move(pi)), source_(std::move(source)), target_(std::move(target)) {
    const int d = source_.dim();
    if (pi_.rows() != d || pi_.cols() != d || target_.dim() != d)
        throw InputError("transport plan dimensions do not match the marginals");
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            double p = pi_(j, k);
            if (!std::isfinite(p) || p < 0.0) {
                std::ostringstream msg;
                msg << "plan entry (" << j << "," << k << ") is invalid (" << p << ")";
                throw InputError(msg.str());
            }
        }
    for (int k = 0; k < d; ++k) {
        double s = pi_.col(k).sum();
        if (std::abs(s - target_[k]) > tol::kPlanMarginal) {
            std::ostringstream msg;
            msg << "plan column " << k << " sums to " << s << ", target marginal is "
                << target_[k];
            throw InputError(msg.str());
        }
    }
    if (std::abs(pi_.sum() - 1.0) > tol::kPlanMarginal)
        throw InputError("plan total mass deviates from 1");
}

TransportPlan solve_balanced(const Marginal& source, const Marginal& target,
                             const CostMatrix& cost, const SolverConfig& cfg,
                             SolveStats* stats) {
    check_config(cfg);
    check_inputs(source, target, cost, /*target_positive=*/true);
    double eps = resolve_epsilon(cost, cfg);
    SolveStats local;
    Matrix pi = run_scaling(source.probs(), target.probs(), cost.m(), eps, 1.0, cfg, &local);
    double row_res = (pi.rowwise().sum() - source.probs()).cwiseAbs().maxCoeff();
    if (row_res > tol::kPlanMarginal) {
        std::ostringstream msg;
        msg << "balanced solve converged in scaling but the row marginal residual "
            << row_res << " exceeds " << tol::kPlanMarginal;
        throw ConvergenceError(msg.str(), local.iterations, row_res);
    }
    if (stats) *stats = local;
    return TransportPlan(std::move(pi), source, target);
}

TransportPlan solve_unbalanced(const Marginal& source, const Marginal& target,
                               const CostMatrix& cost, const SolverConfig& cfg,
                               SolveStats* stats) {
    check_config(cfg);
    check_inputs(source, target, cost, /*target_positive=*/false);
    double eps = resolve_epsilon(cost, cfg);
    double phi = cfg.lambda / (cfg.lambda + eps);
    Matrix pi = run_scaling(source.probs(), target.probs(), cost.m(), eps, phi, cfg, stats);
    return TransportPlan(std::move(pi), source, target);
}

double uot_objective(const TransportPlan& plan, const CostMatrix& cost, double lambda) {
    if (cost.dim() != plan.dim())
        throw InputError("cost matrix dimension does not match the plan");
    if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
    double cost_term = (cost.m().array() * plan.pi().array()).sum();
    Vector r = plan.row_marginal();
    const Vector& a = plan.source().probs();
    double kl = 0.0;
    for (int j = 0; j < r.size(); ++j) {
        if (r[j] <= 0.0) continue;  // 0 log 0 = 0
        if (a[j] <= 0.0) return kInf;
        kl += r[j] * std::log(r[j] / a[j]);
    }
    return cost_term + lambda * kl;
}

double transport_cost(const Marginal& source, const Marginal& target,
                      const CostMatrix& cost, const SolverConfig& cfg) {
    TransportPlan plan = solve_unbalanced(source, target, cost, cfg);
    return uot_objective(plan, cost, cfg.lambda);
}

namespace {

// Grid over [0, limit] with spacing h; the endpoint is always included so
// boundary optima are representable exactly.
std::vector<double> axis_points(double lo, double hi, double h) {
    std::vector<double> pts;
    if (hi <= lo) { pts.push_back(lo); return pts; }
    long n = static_cast<long>(std::floor((hi - lo) / h + 1e-12));
    pts.reserve(static_cast<std::size_t>(n) + 2);
    for (long i = 0; i <= n; ++i) pts.push_back(std::min(lo + static_cast<double>(i) * h, hi));
    if (pts.back() < hi) pts.push_back(hi);
    return pts;
}

double kl_term(double r, double a) { return r > 0.0 ? r * std::log(r / a) : 0.0; }

}  // namespace

TransportPlan oracle_solve(const Marginal& source, const Marginal& target,
                           const CostMatrix& cost, double lambda, double grid_step) {
    if (source.dim() > 3)
        throw InputError("grid oracle supports at most 3 types");
    if (source.dim() != target.dim() || cost.dim() != source.dim())
        throw InputError("oracle inputs have mismatched dimensions");
    if (!source.strictly_positive())
        throw InputError("oracle requires a strictly positive source marginal");
    if (!(lambda > 0.0)) throw ConfigError("oracle lambda must be positive");
    if (!(grid_step > 0.0)) throw ConfigError("oracle grid_step must be positive");

    const int d = source.dim();
    const Vector& a = source.probs();
    const Vector& b = target.probs();
    const Matrix& m = cost.m();

    if (d == 1) return TransportPlan(Matrix::Ones(1, 1), source, target);

    if (d == 2) {
        const double m01 = m(0, 1), m10 = m(1, 0);
        std::vector<double> g0 = axis_points(0.0, b[0], grid_step);
        std::vector<double> g1 = axis_points(0.0, b[1], grid_step);
        double best = kInf, bx0 = 0.0, bx1 = 0.0;
        for (double x0 : g0) {
            double base = m10 * (b[0] - x0);
            for (double x1 : g1) {
                double r0 = x0 + x1;
                double r1 = (b[0] - x0) + (b[1] - x1);
                double obj = base + m01 * x1 +
                             lambda * (kl_term(r0, a[0]) + kl_term(r1, a[1]));
                if (obj < best) { best = obj; bx0 = x0; bx1 = x1; }
            }
        }
        Matrix pi(2, 2);
        pi << bx0, bx1, b[0] - bx0, b[1] - bx1;
        return TransportPlan(std::move(pi), source, target);
    }

    // d == 3: per column k the free coordinates are pi(0,k), pi(1,k) with
    // pi(2,k) = b_k - both. Exhaustive coarse scan, then shrink a +-2 step
    // box around the argmin and halve until grid_step.
    const double m01 = m(0, 1), m02 = m(0, 2), m10 = m(1, 0), m12 = m(1, 2),
                 m20 = m(2, 0), m21 = m(2, 1);
    auto objective = [&](const double c[6]) {
        double z0 = b[0] - c[0] - c[1];
        double z1 = b[1] - c[2] - c[3];
        double z2 = b[2] - c[4] - c[5];
        double cost_sum = m10 * c[1] + m20 * z0 + m01 * c[2] + m21 * z1 + m02 * c[4] + m12 * c[5];
        double r0 = c[0] + c[2] + c[4];
        double r1 = c[1] + c[3] + c[5];
        double r2 = z0 + z1 + z2;
        return cost_sum + lambda * (kl_term(r0, a[0]) + kl_term(r1, a[1]) + kl_term(r2, a[2]));
    };

    double lo[6], hi[6];
    for (int i = 0; i < 6; ++i) { lo[i] = 0.0; hi[i] = b[i / 2]; }
    double step = std::max(b.maxCoeff() / 8.0, grid_step);
    double best = kInf;
    double bc[6] = {0, 0, 0, 0, 0, 0};

    for (;;) {
        std::vector<double> ax[6];
        for (int i = 0; i < 6; ++i) ax[i] = axis_points(lo[i], hi[i], step);
        double c[6];
        const double slack = 1e-15;
        for (double x0 : ax[0]) {
            c[0] = x0;
            for (double y0 : ax[1]) {
                if (x0 + y0 > b[0] + slack) break;
                c[1] = y0;
                for (double x1 : ax[2]) {
                    c[2] = x1;
                    for (double y1 : ax[3]) {
                        if (x1 + y1 > b[1] + slack) break;
                        c[3] = y1;
                        for (double x2 : ax[4]) {
                            c[4] = x2;
                            for (double y2 : ax[5]) {
                                if (x2 + y2 > b[2] + slack) break;
                                c[5] = y2;
                                double obj = objective(c);
                                if (obj < best) {
                                    best = obj;
                                    for (int i = 0; i < 6; ++i) bc[i] = c[i];
                                }
                            }
                        }
                    }
                }
            }
        }
        if (step <= grid_step * (1.0 + 1e-12)) break;
        for (int i = 0; i < 6; ++i) {
            lo[i] = std::max(0.0, bc[i] - 2.0 * step);
            hi[i] = std::min(b[i / 2], bc[i] + 2.0 * step);
        }
        step = std::max(step / 2.0, grid_step);
    }

    Matrix pi(3, 3);
    for (int k = 0; k < 3; ++k) {
        pi(0, k) = bc[2 * k];
        pi(1, k) = bc[2 * k + 1];
        pi(2, k) = std::max(b[k] - bc[2 * k] - bc[2 * k + 1], 0.0);
    }
    return TransportPlan(std::move(pi), source, target);
}

}  // namespace celltraj
