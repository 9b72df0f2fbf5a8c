// Monte Carlo experiment drivers: the variance identity, exponent-scaling
// fits, distributional KS suites, the LDP proxy, and the shared statistics
// helpers (KS test, least-squares fits, moment-based standard errors).
//
// Every experiment is a pure function of (config, seed): replicas draw their
// randomness from counter-based streams keyed by replica index, workers may
// run in any order, and aggregation is a deterministic fold over replica
// index, so results are bitwise reproducible at any thread count.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "betawalk/params.hpp"

namespace betawalk {

// ---------------------------------------------------------------------------
// Statistics helpers
// ---------------------------------------------------------------------------

struct KsResult {
    long n = 0;
    double statistic = 0.0;
    double p_value = 1.0;
};

// One-sample Kolmogorov-Smirnov test with the asymptotic p-value
// Q(z) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 z^2) at the effective
// z = (sqrt(n) + 0.12 + 0.11/sqrt(n)) * D.  Throws below n = 8.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

// Two-sample version (both samples copied and sorted internally).
KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b);

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int n_used = 0;
    bool dropped_smallest = false;  // smallest x excluded as pre-asymptotic
};

// Least squares of log y on log x.  With >= 3 points and r^2 < 0.98 the
// smallest x is dropped once and the fit repeated (pre-asymptotic transient).
FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

// Sample mean with standard error, and unbiased sample variance with the
// fourth-moment standard error sqrt((m4 - m2^2) / n).
std::pair<double, double> mean_and_se(const std::vector<double>& xs);
std::pair<double, double> variance_and_se(const std::vector<double>& xs);

// Run body(0), ..., body(count-1) on a worker pool.  Each index owns its
// output slot, so the result is independent of scheduling.  n_threads <= 0
// picks the default (BETAWALK_THREADS, else hardware concurrency).
void parallel_for(long count, const std::function<void(long)>& body, int n_threads = 0);
int default_threads();
void set_default_threads(int n);  // 0 restores auto-detection

// ---------------------------------------------------------------------------
// Experiment reports
// ---------------------------------------------------------------------------

struct PointEstimate {
    std::string name;
    double value = 0.0;
    double se = 0.0;
};

struct TestResult {
    std::string name;
    long n = 0;
    double statistic = 0.0;
    double p_value = 1.0;
    bool pass = false;
};

struct ExperimentReport {
    std::string name;
    ModelParams params{1.0, 1.0};
    double lambda = 0.0;
    double xi1 = 0.0;
    long n_replicas = 0;

    std::vector<PointEstimate> estimates;
    std::optional<FitResult> fit;
    std::vector<TestResult> tests;

    // Generic numeric table, one row per scan point (CSV payload).
    std::vector<std::string> table_columns;
    std::vector<std::vector<double>> table_rows;

    std::uint64_t seed = 0;
    double runtime_seconds = 0.0;
    std::string version;
    std::vector<std::string> notes;
    bool ok = true;

    const PointEstimate* estimate(const std::string& name) const;
};

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

// Variance identity at v = floor(N xi(lambda)): compares Var(log rho_{0,v})
// against both exact right-hand sides (the e1 and e2 exit decompositions)
// and against their half-sum form Var = E[sum L] + E[sum L-tilde].  Each gap
// is reported in combined-standard-error units.
ExperimentReport variance_identity_experiment(const ModelParams& params, double lambda,
                                              long N, long M, std::uint64_t seed);

// Var(log rho_{0, floor(N xi)}) for each N with a log-log slope fit.  With
// off_characteristic the endpoint is shifted by ceil(N^0.9) along e1 (minus
// the same amount along e2), which restores diffusive ~N scaling.
ExperimentReport log_rho_variance_scan(const ModelParams& params, double lambda,
                                       const std::vector<long>& n_list, long M,
                                       std::uint64_t seed, bool off_characteristic = false);

// Transversal wandering under the forward Doob transform: per replica one
// N-step path through a lazily built stationary field; reports
// Var(X_N . e1 - N xi1), tails P(|X_N - N xi|_1 >= r N^{2/3}) for
// r in {0.1, 1, 2, 4, 8}, and the log Var vs log N slope.
ExperimentReport wandering_experiment(const ModelParams& params, double xi1,
                                      const std::vector<long>& n_list, long M,
                                      std::uint64_t seed);

// KS suite: involution preservation, rho-edge and omega^lambda marginals,
// the forward Doob weight against the hypergeometric density g_lambda, the
// finite-N Busemann estimate against its beta limit, and a deliberately
// wrong null as negative control.  Passes iff every positive test has
// p > 0.001 and the negative control rejects.
ExperimentReport distribution_suite(const ModelParams& params, double lambda, long n,
                                    std::uint64_t seed);

// LDP proxy: -(1/N) log P^omega_0(X_N = [N zeta]) averaged over seeds,
// compared to rate_iq(zeta).
ExperimentReport ldp_proxy_experiment(const ModelParams& params, double zeta1, long N,
                                      long n_seeds, std::uint64_t seed);

}  // namespace betawalk
