#include "betawalk/walk_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace betawalk {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

HittingTable hit_prob_table(const ForwardProb& p_e1, Site z) {
    if (z.i < 0 || z.j < 0) throw std::out_of_range("hit_prob_table: target below origin");
    HittingTable table;
    table.target = z;
    const long W = z.i + 1;
    table.log_p.assign(static_cast<std::size_t>(W) * (z.j + 1), kNegInf);
    const auto at = [&](long i, long j) -> double& {
        return table.log_p[static_cast<std::size_t>(j) * W + i];
    };
    at(z.i, z.j) = 0.0;
    for (long d = z.i + z.j - 1; d >= 0; --d) {
        const long i_lo = std::max(0L, d - z.j);
        const long i_hi = std::min(z.i, d);
        for (long i = i_lo; i <= i_hi; ++i) {
            const long j = d - i;
            const double p = p_e1(i, j);
            const double via_e1 = i < z.i ? std::log(p) + at(i + 1, j) : kNegInf;
            const double via_e2 = j < z.j ? std::log1p(-p) + at(i, j + 1) : kNegInf;
            at(i, j) = logaddexp(via_e1, via_e2);
        }
    }
    return table;
}

double busemann_estimate(const HittingTable& table, Site x, Site y) {
    return table.log_p_at(x.i, x.j) - table.log_p_at(y.i, y.j);
}

double busemann_estimate(const EnvField& env, Site x, Site y, Site z) {
    if (x.i > z.i || x.j > z.j || y.i > z.i || y.j > z.j)
        throw std::out_of_range("busemann_estimate: sites must be <= target");
    const HittingTable table = hit_prob_table(forward_prob(env), z);
    return busemann_estimate(table, x, y);
}

LatticePath sample_path(const ForwardProb& p_e1, Site start, long n_steps, RngStream& rng) {
    LatticePath path;
    path.start = start;
    path.steps.reserve(static_cast<std::size_t>(n_steps));
    Site x = start;
    for (long k = 0; k < n_steps; ++k) {
        const bool step_e1 = rng.next_u01() < p_e1(x.i, x.j);
        path.steps.push_back(step_e1 ? 0 : 1);
        (step_e1 ? x.i : x.j) += 1;
    }
    return path;
}

BackwardExit backward_exit(const TransitionField& backward, Site v, RngStream& rng) {
    if (backward.direction != TransitionField::Direction::Backward)
        throw std::domain_error("backward_exit: needs a Backward transition field");
    Site x = v;
    while (x.i > 0 && x.j > 0) {
        if (!backward.covers(x.i, x.j))
            throw std::out_of_range("backward_exit: walk left the transition field");
        if (rng.next_u01() < backward.p(x.i, x.j))
            x.i -= 1;
        else
            x.j -= 1;
    }
    BackwardExit out;
    out.exit = x;
    out.arm = (x.i > 0) ? 1 : (x.j > 0 ? 2 : 0);
    return out;
}

std::vector<double> polymer_partition(const StationaryField& field) {
    const long M = field.M, N = field.N;
    std::vector<double> log_z(static_cast<std::size_t>(M + 1) * (N + 1), 0.0);
    const auto at = [&](long i, long j) -> double& {
        return log_z[static_cast<std::size_t>(j) * (M + 1) + i];
    };
    for (long i = 1; i <= M; ++i) at(i, 0) = at(i - 1, 0) + std::log(field.rho_h_at(i - 1, 0));
    for (long j = 1; j <= N; ++j) at(0, j) = at(0, j - 1) + std::log(field.rho_v_at(0, j - 1));
    for (long j = 1; j <= N; ++j)
        for (long i = 1; i <= M; ++i) {
            const double w = field.pcheck_at(i, j);
            at(i, j) = logaddexp(at(i - 1, j) + std::log(w), at(i, j - 1) + std::log1p(-w));
        }
    return log_z;
}

std::map<std::vector<std::uint8_t>, double> conditioned_prefix_law(const EnvField& env,
                                                                   Site z, int m) {
    if (m < 0 || m > z.i + z.j)
        throw std::domain_error("conditioned_prefix_law: prefix length exceeds |z|_1");
    const HittingTable table = hit_prob_table(forward_prob(env), z);
    if (table.log_p_at(0, 0) == kNegInf)
        throw std::runtime_error("conditioned_prefix_law: conditioning on a null event");
    std::map<std::vector<std::uint8_t>, double> law;
    std::vector<std::uint8_t> prefix;
    const std::function<void(Site, double)> walk = [&](Site x, double log_w) {
        if (static_cast<int>(prefix.size()) == m) {
            law[prefix] = std::exp(log_w + table.log_p_at(x.i, x.j) - table.log_p_at(0, 0));
            return;
        }
        if (x.i < z.i) {
            prefix.push_back(0);
            walk({x.i + 1, x.j}, log_w + std::log(env.omega(x.i, x.j)));
            prefix.pop_back();
        }
        if (x.j < z.j) {
            prefix.push_back(1);
            walk({x.i, x.j + 1}, log_w + std::log1p(-env.omega(x.i, x.j)));
            prefix.pop_back();
        }
    };
    walk({0, 0}, 0.0);
    return law;
}

namespace {

// log F(x, y) for all x <= y from one table; -inf where unreachable.
double log_ratio(const HittingTable& t, Site num, Site den) {
    const double n = (num.i <= t.target.i && num.j <= t.target.j && num.i >= 0 && num.j >= 0)
                         ? t.log_p_at(num.i, num.j)
                         : kNegInf;
    return n - t.log_p_at(den.i, den.j);
}

// Check lo <= mid <= hi in log space with -inf tolerated, recording slack.
void check_chain(double lo, double mid, double hi, double tol, MonotonicityReport* rep) {
    // -inf <= x always holds; comparisons involving -inf on the larger side
    // only pass if the smaller side is also -inf.
    const auto margin = [](double small, double big) {
        if (small == kNegInf) return 0.0;
        if (big == kNegInf) return -std::numeric_limits<double>::infinity();
        return big - small;
    };
    for (const double m : {margin(lo, mid), margin(mid, hi)}) {
        rep->comparisons += 1;
        if (m < rep->worst_slack) rep->worst_slack = m;
        if (m < -tol) rep->ok = false;
    }
}

}  // namespace

MonotonicityReport ratio_monotonicity_check(const ForwardProb& p_e1, Site a, Site y,
                                            double tol) {
    if (!(y.i >= a.i && y.j >= a.j))
        throw std::out_of_range("ratio_monotonicity_check: need y >= a");
    MonotonicityReport rep;
    const HittingTable t0 = hit_prob_table(p_e1, y);
    const HittingTable t1 = hit_prob_table(p_e1, {y.i + 1, y.j});
    const HittingTable t2 = hit_prob_table(p_e1, {y.i, y.j + 1});
    const Site a1{a.i + 1, a.j};
    const Site a2{a.i, a.j + 1};
    // F(a+e1, y+e2)/F(a, y+e2) <= F(a+e1, y)/F(a, y) <= F(a+e1, y+e1)/F(a, y+e1)
    check_chain(log_ratio(t2, a1, a), log_ratio(t0, a1, a), log_ratio(t1, a1, a), tol, &rep);
    // and with e1 and e2 switched around.
    check_chain(log_ratio(t1, a2, a), log_ratio(t0, a2, a), log_ratio(t2, a2, a), tol, &rep);
    return rep;
}

MonotonicityReport ratio_monotonicity_scan(const ForwardProb& p_e1, long M, long N,
                                           double tol) {
    MonotonicityReport rep;
    // Tables for every target on [0,M] x [0,N]; targets y of the check run
    // over [0,M-1] x [0,N-1] so y+e1 and y+e2 stay inside.
    std::vector<HittingTable> tables(static_cast<std::size_t>(M + 1) * (N + 1));
    for (long j = 0; j <= N; ++j)
        for (long i = 0; i <= M; ++i)
            tables[static_cast<std::size_t>(j) * (M + 1) + i] = hit_prob_table(p_e1, {i, j});
    const auto table = [&](long i, long j) -> const HittingTable& {
        return tables[static_cast<std::size_t>(j) * (M + 1) + i];
    };
    for (long yj = 0; yj < N; ++yj)
        for (long yi = 0; yi < M; ++yi) {
            const HittingTable& t0 = table(yi, yj);
            const HittingTable& t1 = table(yi + 1, yj);
            const HittingTable& t2 = table(yi, yj + 1);
            for (long aj = 0; aj <= yj; ++aj)
                for (long ai = 0; ai <= yi; ++ai) {
                    const Site a{ai, aj};
                    const Site a1{ai + 1, aj};
                    const Site a2{ai, aj + 1};
                    check_chain(log_ratio(t2, a1, a), log_ratio(t0, a1, a),
                                log_ratio(t1, a1, a), tol, &rep);
                    check_chain(log_ratio(t1, a2, a), log_ratio(t0, a2, a),
                                log_ratio(t2, a2, a), tol, &rep);
                }
        }
    return rep;
}

MonotonicityReport boundary_sandwich_scan(const StationaryField& field, double tol) {
    MonotonicityReport rep;
    const long M = field.M, N = field.N;
    const ForwardProb omega = [&field](long i, long j) { return field.omega_at(i, j); };
    for (long yj = 1; yj <= N; ++yj)
        for (long yi = 1; yi <= M; ++yi) {
            const Site y{yi, yj};
            const Site v{yi - 1, yj - 1};
            // E_i(x) = E_x[f(X at first entry of the boundary through y);
            //              entry on arm i], f(x) = rho^lambda(x, y).
            const long W = yi + 1;
            std::vector<double> arm1(static_cast<std::size_t>(W) * (yj + 1));
            std::vector<double> arm2(arm1.size());
            const auto a1 = [&](long i, long j) -> double& {
                return arm1[static_cast<std::size_t>(j) * W + i];
            };
            const auto a2 = [&](long i, long j) -> double& {
                return arm2[static_cast<std::size_t>(j) * W + i];
            };
            for (long i = 0; i <= yi; ++i) {
                const double f = rho_point(field, {i, yj}, y);
                a1(i, yj) = f;  // corner y (i == yi) lies on both arms
                a2(i, yj) = (i < yi) ? 0.0 : f;
            }
            for (long j = 0; j < yj; ++j) {
                const double f = rho_point(field, {yi, j}, y);
                a1(yi, j) = 0.0;
                a2(yi, j) = f;
            }
            for (long d = yi + yj - 2; d >= 0; --d) {
                const long i_lo = std::max(0L, d - (yj - 1));
                const long i_hi = std::min(yi - 1, d);
                for (long i = i_lo; i <= i_hi; ++i) {
                    const long j = d - i;
                    const double w = omega(i, j);
                    a1(i, j) = w * a1(i + 1, j) + (1.0 - w) * a1(i, j + 1);
                    a2(i, j) = w * a2(i + 1, j) + (1.0 - w) * a2(i, j + 1);
                }
            }
            const HittingTable tv = hit_prob_table(omega, v);
            const auto lg = [](double x) { return x > 0.0 ? std::log(x) : kNegInf; };
            for (long aj = 0; aj <= v.j; ++aj)
                for (long ai = 0; ai <= v.i; ++ai) {
                    if (ai + 1 <= v.i) {
                        // E_a[arm2]/E_{a+e1}[arm2] <= F(a,v)/F(a+e1,v)
                        //                          <= E_a[arm1]/E_{a+e1}[arm1]
                        const double mid = tv.log_p_at(ai, aj) - tv.log_p_at(ai + 1, aj);
                        check_chain(lg(a2(ai, aj)) - lg(a2(ai + 1, aj)), mid,
                                    lg(a1(ai, aj)) - lg(a1(ai + 1, aj)), tol, &rep);
                    }
                    if (aj + 1 <= v.j) {
                        const double mid = tv.log_p_at(ai, aj) - tv.log_p_at(ai, aj + 1);
                        check_chain(lg(a1(ai, aj)) - lg(a1(ai, aj + 1)), mid,
                                    lg(a2(ai, aj)) - lg(a2(ai, aj + 1)), tol, &rep);
                    }
                }
        }
    return rep;
}

double brute_force_hit_prob(const ForwardProb& p_e1, Site z) {
    if (z.i + z.j > 16)
        throw std::domain_error("brute_force_hit_prob: |z|_1 must be <= 16");
    double total = 0.0;
    const std::function<void(Site, double)> dfs = [&](Site x, double weight) {
        if (x.i == z.i && x.j == z.j) {
            total += weight;
            return;
        }
        const double p = p_e1(x.i, x.j);
        if (x.i < z.i) dfs({x.i + 1, x.j}, weight * p);
        if (x.j < z.j) dfs({x.i, x.j + 1}, weight * (1.0 - p));
    };
    dfs({0, 0}, 1.0);
    return total;
}

}  // namespace betawalk
