// Exact log-space dynamic programming for quenched hitting probabilities,
// path samplers, Busemann estimators, backward exit points, the stationary
// polymer oracle, conditioned prefix laws, and the hitting-ratio
// monotonicity checks.
//
// All probabilities are kept in log space: off the LLN direction hitting
// probabilities decay exponentially and underflow raw doubles by N ~ 100.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "betawalk/params.hpp"
#include "betawalk/rng.hpp"
#include "betawalk/stationary_env.hpp"

namespace betawalk {

// Stable log(e^x + e^y).
inline double logaddexp(double x, double y) {
    if (x == -std::numeric_limits<double>::infinity()) return y;
    if (y == -std::numeric_limits<double>::infinity()) return x;
    const double hi = x > y ? x : y;
    const double lo = x > y ? y : x;
    return hi + std::log1p(std::exp(lo - hi));
}

// log P^omega_x(X_{|z-x|_1} = z) for all x <= z.
struct HittingTable {
    Site target;
    std::vector<double> log_p;  // (z.i+1) x (z.j+1), row-major in i

    double log_p_at(long i, long j) const {
        return log_p[static_cast<std::size_t>(j) * (target.i + 1) + i];
    }
};

// An up-right lattice path: start site plus a step sequence (0 = e1, 1 = e2).
struct LatticePath {
    Site start;
    std::vector<std::uint8_t> steps;

    Site end() const {
        Site s = start;
        for (auto b : steps) (b ? s.j : s.i) += 1;
        return s;
    }
};

// Accessor signature for forward e1-step probabilities at a site.
using ForwardProb = std::function<double(long, long)>;

inline ForwardProb forward_prob(const EnvField& env) {
    return [&env](long i, long j) { return env.omega(i, j); };
}
inline ForwardProb forward_prob(const TransitionField& tf) {
    return [&tf](long i, long j) { return tf.p(i, j); };
}

// Backward recursion over decreasing antidiagonals from z:
//   log_p(x) = logaddexp(log p_e1(x) + log_p(x+e1), log p_e2(x) + log_p(x+e2)).
HittingTable hit_prob_table(const ForwardProb& p_e1, Site z);

// log P^omega_x(hit z) - log P^omega_y(hit z), both read from one table.
double busemann_estimate(const EnvField& env, Site x, Site y, Site z);
double busemann_estimate(const HittingTable& table, Site x, Site y);

// Sample an n-step path from the given forward transitions.
LatticePath sample_path(const ForwardProb& p_e1, Site start, long n_steps, RngStream& rng);

// Run the backward walk from v until it enters the boundary of the first
// quadrant; returns the exit site and which arm was hit.
struct BackwardExit {
    Site exit;
    int arm = 0;  // 1 = e1-axis (j == 0, i > 0), 2 = e2-axis, 0 = origin
};
BackwardExit backward_exit(const TransitionField& backward, Site v, RngStream& rng);

// log Z_{m,n} of the stationary beta polymer: up-right recursion with
// boundary potentials log rho on the axes and bulk potentials log pcheck on
// interior edges.  Equals log rho^lambda_{0,(m,n)} exactly.
std::vector<double> polymer_partition(const StationaryField& field);  // (M+1) x (N+1)

// Exact law of the first m steps conditioned on hitting z, from one table.
// Keys are step sequences (0 = e1, 1 = e2).
std::map<std::vector<std::uint8_t>, double> conditioned_prefix_law(const EnvField& env,
                                                                   Site z, int m);

// Hitting-ratio monotonicity at one anchor pair (a, a+e1) and target y,
// including the e1<->e2 swapped version at (a, a+e2):
//   F(a+e1,y+e2)/F(a,y+e2) <= F(a+e1,y)/F(a,y) <= F(a+e1,y+e1)/F(a,y+e1).
struct MonotonicityReport {
    bool ok = true;
    double worst_slack = 0.0;  // most negative margin observed (>= -tol passes)
    long comparisons = 0;
};
MonotonicityReport ratio_monotonicity_check(const ForwardProb& p_e1, Site a, Site y,
                                            double tol = 1e-12);

// Scan every anchor/target pair on [0,M] x [0,N].
MonotonicityReport ratio_monotonicity_scan(const ForwardProb& p_e1, long M, long N,
                                           double tol = 1e-12);

// The boundary-functional sandwich: for positive f on the boundary of the
// negative quadrant at y = v + e1 + e2, with E_a[f; arm i] the expectation of
// f at the first entry of that boundary restricted to arm i,
//   E_a[f; arm 2]/E_{a+e1}[f; arm 2] <= F(a,v)/F(a+e1,v)
//                                    <= E_a[f; arm 1]/E_{a+e1}[f; arm 1],
// and the mirrored version for a+e2.  f is taken to be rho^lambda(., y) of
// the supplied stationary field, the walk transitions are the flipped
// environment omega^lambda.
MonotonicityReport boundary_sandwich_scan(const StationaryField& field, double tol = 1e-12);

// Brute-force oracle: sum of path weights over all C(|z|_1, z.i) up-right
// paths from the origin to z (|z|_1 <= 16).
double brute_force_hit_prob(const ForwardProb& p_e1, Site z);

}  // namespace betawalk
