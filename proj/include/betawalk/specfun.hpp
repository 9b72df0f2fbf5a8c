// Special-function numerics used throughout the toolkit:
//   * gamma-family: ln_gamma, polygamma psi_0..psi_4
//   * beta distribution: beta function, regularized CDF, inverse CDF
//   * Gauss hypergeometric series 2F1
//   * the transformed-transition density g_lambda (and its mirror)
//   * the L-weight integral entering the variance identity
//
// All functions are pure and thread-safe.  Domain violations throw
// std::domain_error; convergence failures throw std::runtime_error.

#pragma once

#include <functional>

#include "betawalk/params.hpp"

namespace betawalk {

// Parameters of the transformed-transition density.
struct DensitySpec {
    ModelParams params;
    double lambda = 1.0;
    Branch branch = Branch::RightOfLLN;

    DensitySpec(ModelParams p, double lam, Branch b) : params(p), lambda(lam), branch(b) {
        if (!(std::isfinite(lam) && lam > 0.0))
            throw std::domain_error("DensitySpec: lambda must be finite and > 0");
        if (b == Branch::AtLLN)
            throw std::domain_error("DensitySpec: density is defined off the LLN direction only");
    }
};

// log Gamma(x) for x > 0, relative error <= 1e-13 on [1e-6, 1e6].
double ln_gamma(double x);

// psi_n(x) for n in {0,...,4}, x > 0.  Evaluated by shifting the argument
// upward through the recurrence until x >= 10 and then applying the
// asymptotic series.
double polygamma(int n, double x);

// Euler beta function B(a,b) and its logarithm.
double ln_beta_fn(double a, double b);
double beta_fn(double a, double b);

// Regularized incomplete beta: P(W <= s) for W ~ Beta(a,b), s in (0,1).
double beta_cdf(double s, double a, double b);

// Quantile function: the s in (0,1) with beta_cdf(s,a,b) = u.  Bracketed
// Newton iteration with bisection fallback, tolerance 1e-12 in s.
double beta_inv_cdf(double u, double a, double b);

// Beta density at s (used by the Newton quantile iteration and tests).
double beta_pdf(double s, double a, double b);

// Gauss hypergeometric 2F1(a,b;c;z) by its power series, c > 0, 0 <= z < 1.
// Terms are accumulated until a term's relative contribution falls below
// 1e-16; throws std::runtime_error if 1e6 terms do not suffice.
double gauss_2f1(double a, double b, double c, double z);

// The density g_lambda(x) of the tilted e1-step probability (branch
// RightOfLLN), or its mirror g~_lambda(x) = g_lambda(1-x) with alpha and beta
// swapped (branch LeftOfLLN).  Evaluated through the Euler-integral form with
// adaptive Gauss-Legendre panels refined to relative 1e-10.
double density_g(const DensitySpec& spec, double x);

// density_g evaluated at x = 1 - one_minus_x with the complement supplied
// exactly.  Use this form when x is close to 1: recovering 1 - x from a
// rounded x loses all precision once 1 - x approaches machine epsilon, and
// the density's (1-x)^{lambda-1} prefactor amplifies that loss.
double density_g_c(const DensitySpec& spec, double one_minus_x);

// L~(s,a,b) = -s^{-a} (1-s)^{1-b} int_0^s t^{a-1}(1-t)^{b-1}
//             [log t - (psi_0(a) - psi_0(a+b))] dt  >  0.
// The log singularity at t=0 is removed by substituting t = e^{-u} before
// quadrature.  Throws std::runtime_error if adaptive refinement exceeds its
// depth limit.
double l_weight(double s, double a, double b);

namespace detail {

// Adaptive Gauss-Legendre quadrature of f over [lo, hi]; panels are bisected
// until the local 15-point vs two-half estimate agrees to rel_tol.
double adaptive_gl(const std::function<double(double)>& f, double lo, double hi,
                   double rel_tol, int max_depth);

}  // namespace detail

}  // namespace betawalk
