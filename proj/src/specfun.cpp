#include "betawalk/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace betawalk {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::domain_error(msg);
}

// Bernoulli numbers B_2, B_4, ..., B_16 for the polygamma asymptotic series.
constexpr std::array<double, 8> kBernoulli = {
    1.0 / 6.0,      -1.0 / 30.0,    1.0 / 42.0,       -1.0 / 30.0,
    5.0 / 66.0,     -691.0 / 2730.0, 7.0 / 6.0,        -3617.0 / 510.0,
};

// Asymptotic series for psi_0(x), valid for large x (we use x >= 12):
//   psi_0(x) ~ ln x - 1/(2x) - sum_k B_{2k} / (2k x^{2k}).
double digamma_asymptotic(double x) {
    double result = std::log(x) - 0.5 / x;
    const double inv_x2 = 1.0 / (x * x);
    double power = inv_x2;
    for (std::size_t k = 0; k < kBernoulli.size(); ++k) {
        result -= kBernoulli[k] * power / (2.0 * (k + 1));
        power *= inv_x2;
    }
    return result;
}

// Asymptotic series for psi_n(x), n >= 1, valid for large x:
//   psi_n(x) ~ (-1)^{n+1} [ (n-1)!/x^n + n!/(2 x^{n+1})
//                           + sum_k B_{2k} (2k+n-1)! / ((2k)! x^{2k+n}) ].
double polygamma_asymptotic(int n, double x) {
    double fact_nm1 = 1.0;  // (n-1)!
    for (int i = 2; i < n; ++i) fact_nm1 *= i;
    const double inv_x = 1.0 / x;
    double sum = fact_nm1 * std::pow(inv_x, n) * (1.0 + 0.5 * n * inv_x);
    // term_k = B_{2k} (2k+n-1)! / ((2k)! x^{2k+n})
    double coeff = fact_nm1 * n * (n + 1) / 2.0;  // (n+1)!/(2!) for k=1
    double power = std::pow(inv_x, n + 2);
    for (std::size_t k = 0; k < kBernoulli.size(); ++k) {
        sum += kBernoulli[k] * coeff * power;
        const double two_k = 2.0 * (k + 1);
        coeff *= (two_k + n) * (two_k + n + 1) / ((two_k + 1) * (two_k + 2));
        power *= inv_x * inv_x;
    }
    return ((n % 2 == 0) ? -1.0 : 1.0) * sum;
}

// 15-point Gauss-Legendre nodes (positive half) and weights on [-1, 1].
constexpr std::array<double, 8> kGlNode = {
    0.0,
    0.2011940939974345223006283033945962078128,
    0.3941513470775633698972073709810454683627,
    0.5709721726085388475372267372539106412383,
    0.7244177313601700474161860546139380096308,
    0.8482065834104272162006483207742168513662,
    0.9372733924007059043077589477102094712439,
    0.9879925180204854284895657185866125811469,
};
constexpr std::array<double, 8> kGlWeight = {
    0.2025782419255612728806201999675193148386,
    0.1984314853271115764561183264438393248186,
    0.1861610000155622110268005618664228245062,
    0.1662692058169939335532008604812088111309,
    0.1395706779261543144478047945110283225208,
    0.1071592204671719350118695466858693034845,
    0.0703660474881081247092674164506673384667,
    0.0307532419961172683546283935772044177217,
};

double gl15(const std::function<double(double)>& f, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double sum = kGlWeight[0] * f(mid);
    for (std::size_t k = 1; k < kGlNode.size(); ++k) {
        const double dx = half * kGlNode[k];
        sum += kGlWeight[k] * (f(mid - dx) + f(mid + dx));
    }
    return half * sum;
}

// The error budget is proportional to panel length (tol_per_len is absolute
// tolerance per unit length), so refinement terminates even when the signed
// integral nearly cancels: the scale comes from the integral of |f|, not of f.
// A per-panel relative floor stops refinement at roundoff, and a minimum
// panel length truncates chains descending into integrable endpoint
// singularities once their remaining mass is negligible.
double adaptive_gl_rec(const std::function<double(double)>& f, double lo, double hi,
                       double whole, double tol_per_len, double min_len, int depth,
                       int max_depth) {
    if (depth > max_depth)
        throw std::runtime_error("adaptive_gl: refinement exceeded maximum depth");
    const double mid = 0.5 * (lo + hi);
    const double left = gl15(f, lo, mid);
    const double right = gl15(f, mid, hi);
    const double split = left + right;
    const double err = std::fabs(split - whole);
    if (err <= tol_per_len * (hi - lo) || err <= 1e-14 * std::fabs(split) ||
        hi - lo <= min_len || hi - lo < 1e-13 * (std::fabs(lo) + std::fabs(hi)))
        return split;
    return adaptive_gl_rec(f, lo, mid, left, tol_per_len, min_len, depth + 1, max_depth) +
           adaptive_gl_rec(f, mid, hi, right, tol_per_len, min_len, depth + 1, max_depth);
}

// Continued fraction for the regularized incomplete beta (modified Lentz).
double beta_cont_frac(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("beta_cdf: continued fraction did not converge");
}

}  // namespace

namespace detail {

double adaptive_gl(const std::function<double(double)>& f, double lo, double hi,
                   double rel_tol, int max_depth) {
    if (!(hi > lo)) return 0.0;
    const double whole = gl15(f, lo, hi);
    const double whole_abs = gl15([&f](double x) { return std::fabs(f(x)); }, lo, hi);
    const double scale = std::max({std::fabs(whole), whole_abs, 1e-300});
    return adaptive_gl_rec(f, lo, hi, whole, rel_tol * scale / (hi - lo),
                           1e-12 * (hi - lo), 0, max_depth);
}

}  // namespace detail

double ln_gamma(double x) {
    require(std::isfinite(x) && x > 0.0, "ln_gamma: argument must be finite and > 0");
    return std::lgamma(x);
}

double polygamma(int n, double x) {
    require(std::isfinite(x) && x > 0.0, "polygamma: argument must be finite and > 0");
    if (n < 0) throw std::domain_error("polygamma: order must be >= 0");
    if (n > 4) throw std::domain_error("polygamma: orders above 4 are unsupported");
    // Shift upward until the asymptotic series is accurate, accumulating the
    // recurrence terms psi_n(x) = psi_n(x+1) + (-1)^{n+1} n! / x^{n+1}.
    constexpr double kAsymptoticCutoff = 12.0;
    double fact_n = 1.0;
    for (int i = 2; i <= n; ++i) fact_n *= i;
    const double sign = (n % 2 == 0) ? -1.0 : 1.0;  // (-1)^{n+1}
    double shift = 0.0;
    while (x < kAsymptoticCutoff) {
        shift += sign * fact_n * std::pow(x, -(n + 1));
        x += 1.0;
    }
    const double tail = (n == 0) ? digamma_asymptotic(x) : polygamma_asymptotic(n, x);
    return tail + shift;
}

double ln_beta_fn(double a, double b) {
    require(std::isfinite(a) && a > 0.0 && std::isfinite(b) && b > 0.0,
            "beta_fn: parameters must be finite and > 0");
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double beta_fn(double a, double b) { return std::exp(ln_beta_fn(a, b)); }

double beta_pdf(double s, double a, double b) {
    require(s > 0.0 && s < 1.0, "beta_pdf: argument must be in (0,1)");
    return std::exp((a - 1.0) * std::log(s) + (b - 1.0) * std::log1p(-s) - ln_beta_fn(a, b));
}

double beta_cdf(double s, double a, double b) {
    require(std::isfinite(a) && a > 0.0 && std::isfinite(b) && b > 0.0,
            "beta_cdf: parameters must be finite and > 0");
    require(s > 0.0 && s < 1.0, "beta_cdf: argument must be in (0,1)");
    const double front = std::exp(a * std::log(s) + b * std::log1p(-s) - ln_beta_fn(a, b));
    if (s < (a + 1.0) / (a + b + 2.0))
        return front * beta_cont_frac(a, b, s) / a;
    return 1.0 - front * beta_cont_frac(b, a, 1.0 - s) / b;
}

double beta_inv_cdf(double u, double a, double b) {
    require(std::isfinite(a) && a > 0.0 && std::isfinite(b) && b > 0.0,
            "beta_inv_cdf: parameters must be finite and > 0");
    require(u > 0.0 && u < 1.0, "beta_inv_cdf: argument must be in (0,1)");
    // Closed forms when one parameter is 1: F(s) = s^a resp. 1-(1-s)^b.
    if (b == 1.0) return std::exp(std::log(u) / a);
    if (a == 1.0) return -std::expm1(std::log1p(-u) / b);

    double lo = 0.0, hi = 1.0;
    double s = a / (a + b);  // start at the mean
    for (int iter = 0; iter < 200; ++iter) {
        const double err = beta_cdf(s, a, b) - u;
        if (err > 0.0)
            hi = s;
        else
            lo = s;
        const double pdf = beta_pdf(s, a, b);
        double next = (pdf > 0.0) ? s - err / pdf : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::fabs(next - s);
        s = next;
        if (step < 1e-13 && hi - lo < 1e-12) break;
    }
    return s;
}

double gauss_2f1(double a, double b, double c, double z) {
    require(std::isfinite(c) && c > 0.0, "gauss_2f1: c must be finite and > 0");
    require(z >= 0.0 && z < 1.0, "gauss_2f1: z must be in [0,1)");
    double term = 1.0;
    double sum = 1.0;
    for (long k = 0; k < 1000000; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if (std::fabs(term) <= 1e-16 * std::fabs(sum)) return sum;
    }
    throw std::runtime_error("gauss_2f1: series did not converge within 1e6 terms");
}

namespace {

// Core evaluation with x and 1-x supplied as an exact pair, so neither
// complement is recovered by subtraction.
double density_g_core(const DensitySpec& spec, double x, double one_minus_x) {
    if (spec.branch == Branch::LeftOfLLN) {
        // g~_lambda(x; alpha, beta) = g_lambda(1-x; beta, alpha).
        DensitySpec mirrored(spec.params.swapped(), spec.lambda, Branch::RightOfLLN);
        return density_g_core(mirrored, one_minus_x, x);
    }
    const double alpha = spec.params.alpha;
    const double beta = spec.params.beta;
    const double lambda = spec.lambda;
    const double p = alpha + lambda;  // exponent of u at 0
    const double q = alpha + beta;    // exponent of (1-u) at 1
    // Power substitutions are only needed for non-integer endpoint powers;
    // for integer powers the plain integrand is smooth and refines faster.
    const double p_sub = std::fabs(p - std::round(p)) < 1e-12 ? 1.0 : p;
    const double q_sub = std::fabs(q - std::round(q)) < 1e-12 ? 1.0 : q;
    // Euler-integral form: the density is
    //   x^{alpha-1} (1-x)^{lambda-1} / (B(lambda,alpha) B(alpha+lambda,beta))
    //     * int_0^1 (1 - x u)^{-(alpha+lambda)} u^{alpha+lambda-1}
    //               (1-u)^{alpha+beta-1} du.
    // The endpoint powers are absorbed by substituting u = w^{1/p} on the left
    // half and 1-u = w^{1/q} on the right half, leaving smooth integrands.
    // 1 - x u = (1-u) + u (1-x): formed from the exact complements so no
    // precision is lost when x is near 1.
    const auto phi = [&](double u) {
        return std::exp(-p * std::log((1.0 - u) + u * one_minus_x));
    };
    const auto left = [&](double w) {
        const double u = std::pow(w, 1.0 / p_sub);
        const double rest = p_sub == p ? 1.0 : std::exp((p - p_sub) * std::log(u));
        return rest * std::exp((q - 1.0) * std::log1p(-u)) * phi(u);
    };
    const auto right = [&](double w) {
        const double one_minus_u = std::pow(w, 1.0 / q_sub);
        const double u = 1.0 - one_minus_u;
        const double rest = q_sub == q ? 1.0 : std::exp((q - q_sub) * std::log(one_minus_u));
        // 1 - x u = (1-x) + x (1-u): formed from the exact complements to avoid
        // catastrophic cancellation when both x and u are near 1.
        const double one_minus_xu = one_minus_x + x * one_minus_u;
        return rest * std::exp((p - 1.0) * std::log(u) - p * std::log(one_minus_xu));
    };
    // (1 - x u)^{-p} peaks at u = 1 with width (1-x)/x, i.e. width
    // ((1-x)/x)^{q_sub} in w.  For x near 1 the integrand layers span many
    // decades of w, so the right piece is integrated in t = log w, where every
    // feature has O(1) width.  Below the peak the integrand in t decays at
    // least like e^t, so truncating 35 e-foldings under the peak is lossless.
    const double w_hi = std::pow(0.5, q_sub);
    double w_peak = w_hi;
    if (one_minus_x < x) w_peak = std::min(w_hi, std::pow(one_minus_x / x, q_sub));
    const auto right_log = [&](double t) {
        const double w = std::exp(t);
        return right(w) * w;
    };
    const double right_int = detail::adaptive_gl(right_log, std::log(w_peak) - 35.0,
                                                 std::log(w_hi), 1e-10, 120);
    // The left piece gets the same treatment: in t = log w the fractional
    // endpoint power w^{1/p_sub} becomes the analytic e^{t/p_sub} and the
    // Jacobian e^t supplies the exponential cutoff.
    const auto left_log = [&](double t) {
        const double w = std::exp(t);
        return left(w) * w;
    };
    const double left_hi = p_sub * std::log(0.5);
    const double left_int = detail::adaptive_gl(left_log, left_hi - 35.0, left_hi, 1e-10, 120);
    const double integral = left_int / p_sub + right_int / q_sub;
    const double log_front = (alpha - 1.0) * std::log(x) +
                             (lambda - 1.0) * std::log(one_minus_x) -
                             ln_beta_fn(lambda, alpha) - ln_beta_fn(p, beta);
    return std::exp(log_front) * integral;
}

}  // namespace

double density_g(const DensitySpec& spec, double x) {
    require(x > 0.0 && x < 1.0, "density_g: argument must be in (0,1)");
    return density_g_core(spec, x, 1.0 - x);
}

double density_g_c(const DensitySpec& spec, double one_minus_x) {
    require(one_minus_x > 0.0 && one_minus_x < 1.0,
            "density_g_c: complement must be in (0,1)");
    return density_g_core(spec, 1.0 - one_minus_x, one_minus_x);
}

double l_weight(double s, double a, double b) {
    require(std::isfinite(a) && a > 0.0 && std::isfinite(b) && b > 0.0,
            "l_weight: parameters must be finite and > 0");
    require(s > 0.0 && s < 1.0, "l_weight: argument must be in (0,1)");
    const double centering = polygamma(0, a) - polygamma(0, a + b);
    // Substituting t = e^{-u} turns the integral into
    //   int_{u0}^{infty} e^{-a u} (1 - e^{-u})^{b-1} (u + centering) du,
    // with u0 = -log s; the integrand is bounded on the domain and decays
    // exponentially, so we truncate once the tail is negligible.
    const double u0 = -std::log(s);
    const double cutoff = u0 + (50.0 + std::log1p(std::fabs(centering))) / a;
    const auto integrand = [&](double u) {
        return std::exp(-a * u + (b - 1.0) * std::log(-std::expm1(-u))) * (u + centering);
    };
    const double integral = detail::adaptive_gl(integrand, u0, cutoff, 1e-12, 80);
    return std::exp(-a * std::log(s) + (1.0 - b) * std::log1p(-s)) * integral;
}

}  // namespace betawalk
