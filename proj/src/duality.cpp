#include "betawalk/duality.hpp"

#include <cmath>
#include <stdexcept>

#include "betawalk/specfun.hpp"

namespace betawalk {

namespace {

constexpr double kLLNTolerance = 1e-14;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Bisection in log-lambda for a strictly decreasing function f with
// f(lambda*) = 0.  The starting bracket expands geometrically until the sign
// changes; monotonicity with known limits guarantees a sign change.
double solve_decreasing(const std::function<double(double)>& f) {
    double lo = 1e-8, hi = 1e8;
    int guard = 0;
    while (f(lo) < 0.0) {
        lo /= 1e4;
        if (++guard > 60) throw std::runtime_error("duality: bracket expansion failed (low)");
    }
    guard = 0;
    while (f(hi) > 0.0) {
        hi *= 1e4;
        if (++guard > 60) throw std::runtime_error("duality: bracket expansion failed (high)");
    }
    double log_lo = std::log(lo), log_hi = std::log(hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = std::exp(0.5 * (log_lo + log_hi));
        const double val = f(mid);
        if (std::fabs(val) <= 1e-13 && log_hi - log_lo < 1e-13) return mid;
        if (val > 0.0)
            log_lo = std::log(mid);
        else
            log_hi = std::log(mid);
    }
    return std::exp(0.5 * (log_lo + log_hi));
}

}  // namespace

Velocity xi_of_lambda(const ModelParams& params, double lambda, Branch branch) {
    if (!(lambda > 0.0)) throw std::domain_error("xi_of_lambda: lambda must be > 0");
    if (branch == Branch::AtLLN || std::isinf(lambda)) return Velocity(params.chi1());
    const double alpha = params.alpha, beta = params.beta;
    const double t1 = polygamma(1, lambda);
    const double t_ab = polygamma(1, alpha + beta + lambda);
    if (branch == Branch::RightOfLLN)
        return Velocity((t1 - polygamma(1, alpha + lambda)) / (t1 - t_ab));
    return Velocity(1.0 - (t1 - polygamma(1, beta + lambda)) / (t1 - t_ab));
}

DualPoint lambda_of_xi(const ModelParams& params, const Velocity& xi) {
    if (!(xi.xi1 > 0.0 && xi.xi1 < 1.0))
        throw std::domain_error("lambda_of_xi: xi1 must lie in (0,1)");
    const double chi1 = params.chi1();
    if (std::fabs(xi.xi1 - chi1) <= kLLNTolerance)
        return DualPoint{std::numeric_limits<double>::infinity(), Branch::AtLLN, xi, {}};
    const Branch branch = xi.xi1 > chi1 ? Branch::RightOfLLN : Branch::LeftOfLLN;
    // On either branch the distance |xi1(lambda) - chi1| decreases in lambda,
    // so f below is strictly decreasing (sign-adjusted on the left branch).
    const double target = xi.xi1;
    const auto f = [&](double lambda) {
        const double value = xi_of_lambda(params, lambda, branch).xi1;
        return branch == Branch::RightOfLLN ? value - target : target - value;
    };
    const double lambda = solve_decreasing(f);
    return DualPoint{lambda, branch, xi, {}};
}

DualPoint lambda_of_tilt(const ModelParams& params, double t) {
    if (!(std::isfinite(t) && t >= 0.0))
        throw std::domain_error("lambda_of_tilt: tilt must be finite and >= 0");
    if (t == 0.0) {
        DualPoint point{std::numeric_limits<double>::infinity(), Branch::AtLLN,
                        Velocity(params.chi1()), t};
        return point;
    }
    const double sum_ab = params.alpha + params.beta;
    const auto f = [&](double lambda) {
        return polygamma(0, sum_ab + lambda) - polygamma(0, lambda) - t;
    };
    const double lambda = solve_decreasing(f);
    DualPoint point{lambda, Branch::RightOfLLN,
                    xi_of_lambda(params, lambda, Branch::RightOfLLN), t};
    return point;
}

double rate_iq(const ModelParams& params, const Velocity& xi) {
    const double alpha = params.alpha, beta = params.beta;
    // Endpoints are the lambda -> 0 limits of the two branches.
    if (xi.xi1 >= 1.0) return polygamma(0, alpha + beta) - polygamma(0, alpha);
    if (xi.xi1 <= 0.0) return polygamma(0, alpha + beta) - polygamma(0, beta);
    const DualPoint dual = lambda_of_xi(params, xi);
    if (dual.branch == Branch::AtLLN) return 0.0;
    const double lambda = dual.lambda;
    const double psi_all = polygamma(0, alpha + beta + lambda);
    const double psi_lam = polygamma(0, lambda);
    // Grouped so each parenthesis stays finite as lambda -> 0.
    if (dual.branch == Branch::RightOfLLN) {
        const double psi_a = polygamma(0, alpha + lambda);
        return xi.xi1 * (psi_all - psi_a) + xi.xi2() * (psi_lam - psi_a);
    }
    const double psi_b = polygamma(0, beta + lambda);
    return xi.xi2() * (psi_all - psi_b) + xi.xi1 * (psi_lam - psi_b);
}

double rate_ia(const ModelParams& params, const Velocity& xi) {
    const double chi1 = params.chi1();
    return xlogx(xi.xi1) - xi.xi1 * std::log(chi1) + xlogx(xi.xi2()) -
           xi.xi2() * std::log(1.0 - chi1);
}

double iq_star(const ModelParams& params, double t) {
    if (!std::isfinite(t)) throw std::domain_error("iq_star: tilt must be finite");
    if (t == 0.0) return 0.0;
    if (t > 0.0) {
        const double lambda = lambda_of_tilt(params, t).lambda;
        return polygamma(0, params.alpha + lambda) - polygamma(0, lambda);
    }
    const double lambda = lambda_of_tilt(params, -t).lambda;
    return t + polygamma(0, params.beta + lambda) - polygamma(0, lambda);
}

double iq_star(const ModelParams& params, double t, double s) {
    return s + iq_star(params, t - s);
}

std::pair<double, double> busemann_means(const ModelParams& params, const Velocity& xi) {
    if (!xi.interior()) throw std::domain_error("busemann_means: xi1 must lie in (0,1)");
    const double alpha = params.alpha, beta = params.beta;
    const DualPoint dual = lambda_of_xi(params, xi);
    if (dual.branch == Branch::AtLLN) return {0.0, 0.0};
    const double lambda = dual.lambda;
    if (dual.branch == Branch::RightOfLLN) {
        const double psi_a = polygamma(0, alpha + lambda);
        return {psi_a - polygamma(0, alpha + beta + lambda), psi_a - polygamma(0, lambda)};
    }
    const double psi_b = polygamma(0, beta + lambda);
    return {psi_b - polygamma(0, lambda), psi_b - polygamma(0, alpha + beta + lambda)};
}

IqExpansion iq_expansion_coeffs(const ModelParams& params) {
    const double a = params.alpha, b = params.beta;
    const double s = a + b;
    IqExpansion out;
    out.c2 = s * s / (2.0 * a * b);
    out.c3 = s * s * s * (a - b) / (6.0 * a * a * b * b);
    out.c4 = std::pow(s, 4) * (2.0 * a * a - 2.0 * a * b + 2.0 * b * b + 1.0) /
             (24.0 * std::pow(a, 3) * std::pow(b, 3));
    out.ia_c4 = std::pow(s, 3) * (std::pow(a, 3) + std::pow(b, 3)) /
                (12.0 * std::pow(a, 3) * std::pow(b, 3));
    out.gap_d4 = std::pow(s, 4) / (std::pow(a, 3) * std::pow(b, 3));
    return out;
}

}  // namespace betawalk
