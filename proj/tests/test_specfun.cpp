// Unit tests for the special-function layer: gamma family, beta
// distribution utilities, the Gauss hypergeometric series, the
// transformed-transition density, and the L-weight integral.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "betawalk/rng.hpp"
#include "betawalk/specfun.hpp"

using namespace betawalk;

namespace {

// Composite quadrature on a dyadic mesh graded toward 0.  The graded mesh
// absorbs the residual endpoint singularity left after the power
// substitution, and the shallow per-panel depth keeps round-off noise in
// the integrand from triggering runaway refinement.
double graded_integral(const std::function<double(double)>& f, double width) {
    double total = 0.0;
    double hi = width;
    for (int k = 0; k < 52; ++k) {
        const double lo = hi * 0.5;
        total += detail::adaptive_gl(f, lo, hi, 1e-9, 6);
        hi = lo;
    }
    return total;
}

// Normalization integral of density_g over (0,1).  The endpoint behaviors
// x^{alpha-1} at 0 and (1-x)^{min(beta,lambda)-1} at 1 are flattened by power
// substitutions; the complement-aware entry point keeps the x -> 1 tail
// accurate where 1-x approaches machine epsilon.
double integrate_density(const DensitySpec& spec) {
    const bool mirrored = spec.branch == Branch::LeftOfLLN;
    const double p = mirrored ? std::min(spec.params.alpha, spec.lambda) : spec.params.alpha;
    const double q = mirrored ? spec.params.beta : std::min(spec.params.beta, spec.lambda);
    const auto left = [&](double s) {
        const double x = std::pow(s, 1.0 / p);
        if (x <= 0.0) return 0.0;
        return density_g(spec, x) * x / (p * s);
    };
    const auto right = [&](double w) {
        const double omx = std::pow(w, 1.0 / q);
        if (omx <= 0.0) return 0.0;
        return density_g_c(spec, omx) * omx / (q * w);
    };
    return graded_integral(left, std::pow(0.5, p)) + graded_integral(right, std::pow(0.5, q));
}

}  // namespace

// ---------------------------------------------------------------------------
// Gamma family
// ---------------------------------------------------------------------------

TEST_CASE("ln_gamma at classical points") {
    CHECK(ln_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(ln_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-13));
    CHECK(ln_gamma(0.5) == doctest::Approx(0.5 * std::log(std::acos(-1.0))).epsilon(1e-13));
    CHECK_THROWS_AS(ln_gamma(0.0), std::domain_error);
    CHECK_THROWS_AS(ln_gamma(-1.0), std::domain_error);
}

TEST_CASE("polygamma classical values") {
    const double pi = std::acos(-1.0);
    CHECK(polygamma(0, 1.0) == doctest::Approx(-0.57721566490153286).epsilon(1e-13));
    CHECK(polygamma(1, 1.0) == doctest::Approx(pi * pi / 6.0).epsilon(1e-13));
    CHECK(polygamma(2, 1.0) == doctest::Approx(-2.4041138063191886).epsilon(1e-13));
    CHECK_THROWS_AS(polygamma(5, 1.0), std::domain_error);
    CHECK_THROWS_AS(polygamma(0, 0.0), std::domain_error);
}

TEST_CASE("polygamma recurrence residuals stay below 1e-12") {
    // psi_n(x+1) - psi_n(x) = (-1)^n n! / x^{n+1}
    for (int n = 0; n <= 3; ++n) {
        double fact = 1.0;
        for (int k = 2; k <= n; ++k) fact *= k;
        for (double x : {0.1, 0.5, 1.0, 2.0, 10.0, 100.0}) {
            const double step = (n % 2 == 0 ? 1.0 : -1.0) * fact / std::pow(x, n + 1);
            const double resid = polygamma(n, x) - polygamma(n, x + 1.0) + step;
            CHECK(std::fabs(resid) <= 1e-12 * std::max(1.0, std::fabs(polygamma(n, x))));
        }
    }
}

TEST_CASE("polygamma signs and the psi2 + psi1^2 > 0 inequality") {
    for (double lx = -3.0; lx <= 3.0; lx += 0.125) {
        const double x = std::pow(10.0, lx);
        CHECK(polygamma(1, x) > 0.0);
        CHECK(polygamma(2, x) < 0.0);
        CHECK(polygamma(3, x) > 0.0);
        CHECK(polygamma(2, x) + polygamma(1, x) * polygamma(1, x) > 0.0);
    }
}

TEST_CASE("polygamma difference expansion at x = 50") {
    // psi_n(x+a) - psi_n(x) = (-1)^n a / x^{n+1} * (n! - (a-1)(n+1)!/(2x)
    //   + (a-1)(2a-1)(n+2)!/(12 x^2) - a(a-1)^2 (n+3)!/(24 x^3)
    //   + (6a^4 - 15a^3 + 10a^2 - 1)(n+4)!/(720 x^4) + O(x^-5)).
    const double x = 50.0;
    for (int n = 1; n <= 3; ++n) {
        double fact = 1.0;
        for (int k = 2; k <= n; ++k) fact *= k;
        const double f1 = fact * (n + 1);
        const double f2 = f1 * (n + 2);
        const double f3 = f2 * (n + 3);
        const double f4 = f3 * (n + 4);
        for (double a : {0.5, 1.0, 2.0}) {
            const double series =
                fact - (a - 1.0) * f1 / (2.0 * x) +
                (a - 1.0) * (2.0 * a - 1.0) * f2 / (12.0 * x * x) -
                a * (a - 1.0) * (a - 1.0) * f3 / (24.0 * x * x * x) +
                (6.0 * std::pow(a, 4) - 15.0 * std::pow(a, 3) + 10.0 * a * a - 1.0) * f4 /
                    (720.0 * std::pow(x, 4));
            const double expansion = (n % 2 == 0 ? 1.0 : -1.0) * a / std::pow(x, n + 1) * series;
            const double exact = polygamma(n, x + a) - polygamma(n, x);
            CHECK(exact == doctest::Approx(expansion).epsilon(1e-6));
        }
    }
}

// ---------------------------------------------------------------------------
// Beta distribution utilities
// ---------------------------------------------------------------------------

TEST_CASE("beta function closed forms") {
    CHECK(beta_fn(2.0, 3.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
    CHECK(beta_fn(0.5, 0.5) == doctest::Approx(std::acos(-1.0)).epsilon(1e-13));
    CHECK(ln_beta_fn(2.0, 3.0) == doctest::Approx(std::log(1.0 / 12.0)).epsilon(1e-12));
}

TEST_CASE("beta CDF special cases and monotonicity") {
    CHECK(beta_cdf(0.5, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(beta_cdf(0.25, 2.0, 1.0) == doctest::Approx(0.0625).epsilon(1e-12));
    double prev = 0.0;
    for (double s = 0.05; s < 1.0; s += 0.05) {
        const double c = beta_cdf(s, 1.7, 0.4);
        CHECK(c > prev);
        prev = c;
    }
    CHECK_THROWS_AS(beta_cdf(0.5, -1.0, 1.0), std::domain_error);
}

TEST_CASE("beta inverse CDF closed form and round trips") {
    CHECK(beta_inv_cdf(0.75, 2.0, 1.0) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));
    for (double a : {0.5, 1.0, 2.0, 5.0})
        for (double b : {0.5, 1.0, 2.0, 5.0})
            for (double s = 0.1; s < 1.0; s += 0.2) {
                const double u = beta_cdf(s, a, b);
                CHECK(beta_inv_cdf(u, a, b) == doctest::Approx(s).epsilon(1e-10));
            }
}

// ---------------------------------------------------------------------------
// Gauss hypergeometric series
// ---------------------------------------------------------------------------

TEST_CASE("2F1 at z = 0 and the log closed form") {
    CHECK(gauss_2f1(1.3, -0.7, 2.9, 0.0) == 1.0);
    CHECK(gauss_2f1(1.0, 1.0, 2.0, 0.5) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("2F1 symmetry in (a,b)") {
    for (double z : {0.1, 0.5, 0.9})
        CHECK(gauss_2f1(0.7, 2.4, 3.1, z) == doctest::Approx(gauss_2f1(2.4, 0.7, 3.1, z)).epsilon(1e-14));
}

TEST_CASE("2F1 matches its Euler integral at (2,2,4,0.25)") {
    // 2F1(a,b;c;z) = int_0^1 t^{b-1} (1-t)^{c-b-1} (1-zt)^{-a} dt / B(b, c-b)
    const double a = 2.0, b = 2.0, c = 4.0, z = 0.25;
    const auto integrand = [&](double t) {
        return std::pow(t, b - 1.0) * std::pow(1.0 - t, c - b - 1.0) * std::pow(1.0 - z * t, -a);
    };
    const double integral = detail::adaptive_gl(integrand, 0.0, 1.0, 1e-12, 60);
    CHECK(gauss_2f1(a, b, c, z) == doctest::Approx(integral / beta_fn(b, c - b)).epsilon(1e-10));
}

// ---------------------------------------------------------------------------
// Transformed-transition density
// ---------------------------------------------------------------------------

TEST_CASE("density_g integrates to 1 across the parameter grid") {
    for (double alpha : {0.5, 1.0, 2.0})
        for (double beta : {0.5, 1.0, 2.0})
            for (double lambda : {0.5, 1.0, 2.0}) {
                const DensitySpec spec(ModelParams(alpha, beta), lambda, Branch::RightOfLLN);
                CHECK(integrate_density(spec) == doctest::Approx(1.0).epsilon(1e-6));
            }
}

TEST_CASE("mirrored branch is the reflected density with swapped shapes") {
    const DensitySpec left(ModelParams(1.0, 2.0), 0.7, Branch::LeftOfLLN);
    const DensitySpec right(ModelParams(2.0, 1.0), 0.7, Branch::RightOfLLN);
    for (double x = 0.05; x < 1.0; x += 0.1)
        CHECK(density_g(left, x) == doctest::Approx(density_g(right, 1.0 - x)).epsilon(1e-10));
}

TEST_CASE("density_g domain errors") {
    const DensitySpec spec(ModelParams(1.0, 1.0), 1.0, Branch::RightOfLLN);
    CHECK_THROWS_AS(density_g(spec, 0.0), std::domain_error);
    CHECK_THROWS_AS(density_g(spec, 1.0), std::domain_error);
    CHECK_THROWS_AS(DensitySpec(ModelParams(1.0, 1.0), -1.0, Branch::RightOfLLN), std::domain_error);
    CHECK_THROWS_AS(DensitySpec(ModelParams(1.0, 1.0), 1.0, Branch::AtLLN), std::domain_error);
}

TEST_CASE("density_g is not a beta density") {
    // Moment-match a Beta(gamma, delta) and show a sup-norm discrepancy.
    const DensitySpec spec(ModelParams(1.0, 1.0), 1.0, Branch::RightOfLLN);
    const auto moment = [&](int k) {
        return detail::adaptive_gl(
            [&](double x) { return std::pow(x, k) * density_g(spec, x); }, 1e-9, 1.0 - 1e-9,
            1e-9, 100);
    };
    const double m1 = moment(1);
    const double m2 = moment(2);
    const double var = m2 - m1 * m1;
    const double common = m1 * (1.0 - m1) / var - 1.0;
    const double gamma = m1 * common;
    const double delta = (1.0 - m1) * common;
    double sup = 0.0;
    for (double x = 0.05; x < 1.0; x += 0.01)
        sup = std::max(sup, std::fabs(density_g(spec, x) - beta_pdf(x, gamma, delta)));
    CHECK(sup > 1e-3);
}

// ---------------------------------------------------------------------------
// L-weight
// ---------------------------------------------------------------------------

TEST_CASE("l_weight is strictly positive") {
    for (double s : {0.01, 0.3, 0.5, 0.9, 0.999, 0.99986559046241741})
        for (double a : {0.5, 1.0, 2.0})
            for (double b : {0.5, 1.0, 2.0})
                CHECK(l_weight(s, a, b) > 0.0);
    CHECK_THROWS_AS(l_weight(0.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(l_weight(0.5, -1.0, 1.0), std::domain_error);
}

TEST_CASE("l_weight matches its covariance representation by Monte Carlo") {
    // L~(s,a,b) = s^{-a} (1-s)^{1-b} B(a,b) Cov(-log W, 1{W <= s}), W ~ Beta(a,b).
    const double s = 0.5, a = 2.0, b = 1.0;
    const long n = 1000000;
    std::vector<double> neg_log(n), ind(n);
    double mean_log = 0.0, mean_ind = 0.0;
    for (long k = 0; k < n; ++k) {
        const double w = beta_inv_cdf(uniform_site(20240817u, RngRole::Generic, k, 0), a, b);
        neg_log[static_cast<std::size_t>(k)] = -std::log(w);
        ind[static_cast<std::size_t>(k)] = w <= s ? 1.0 : 0.0;
        mean_log += neg_log[static_cast<std::size_t>(k)];
        mean_ind += ind[static_cast<std::size_t>(k)];
    }
    mean_log /= n;
    mean_ind /= n;
    double cov = 0.0, var = 0.0;
    for (long k = 0; k < n; ++k) {
        const double c = (neg_log[static_cast<std::size_t>(k)] - mean_log) *
                         (ind[static_cast<std::size_t>(k)] - mean_ind);
        cov += c;
        var += c * c;
    }
    cov /= n;
    var = var / n - cov * cov;
    const double se = std::sqrt(var / n);
    const double scale = std::pow(s, -a) * std::pow(1.0 - s, 1.0 - b) * beta_fn(a, b);
    CHECK(std::fabs(l_weight(s, a, b) - scale * cov) <= 3.0 * scale * se);
}

TEST_CASE("l_weight small-s asymptotics") {
    // As s -> 0 the covariance representation gives
    //   L~(s,a,b) = log(1/s)/a + 1/a^2 - (psi0(a+b) - psi0(a))/a + O(s^a log s).
    for (const auto& [a, b] : {std::pair{2.0, 1.0}, std::pair{0.5, 0.5}}) {
        const double s = 1e-6;
        const double limit = std::log(1.0 / s) / a + 1.0 / (a * a) -
                             (polygamma(0, a + b) - polygamma(0, a)) / a;
        CHECK(l_weight(s, a, b) == doctest::Approx(limit).epsilon(5e-3));
    }
}
