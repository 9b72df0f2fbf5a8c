// The xi <-> lambda <-> t parameter duality and the large-deviation rate
// functions of the beta walk.
//
// A velocity xi = (xi1, 1-xi1) off the LLN direction chi corresponds to a
// unique tilting parameter lambda in (0, infinity) through a ratio of
// trigamma differences; the tilt t >= 0 corresponds to lambda through a
// digamma difference.  The quenched rate function I_q, the averaged rate
// function I_a, the convex conjugate I_q^*, the mean Busemann increments, and
// the Taylor coefficients of I_q around chi are all explicit in lambda.

#pragma once

#include <limits>
#include <optional>
#include <utility>

#include "betawalk/params.hpp"

namespace betawalk {

// A velocity xi = (xi1, 1-xi1) in the simplex of limiting velocities.
struct Velocity {
    double xi1 = 0.5;

    Velocity() = default;
    explicit Velocity(double x) : xi1(x) {
        if (!(std::isfinite(x) && x >= 0.0 && x <= 1.0))
            throw std::domain_error("Velocity: xi1 must lie in [0,1]");
    }
    double xi2() const { return 1.0 - xi1; }
    bool interior() const { return xi1 > 0.0 && xi1 < 1.0; }
};

// A point of the duality: lambda in (0, infinity], its branch relative to
// chi, the matching velocity, and (when derived from a tilt) the tilt t.
struct DualPoint {
    double lambda = std::numeric_limits<double>::infinity();
    Branch branch = Branch::AtLLN;
    Velocity xi;
    std::optional<double> tilt;
};

// Closed-form velocity for a given lambda (trigamma-difference ratio).
Velocity xi_of_lambda(const ModelParams& params, double lambda, Branch branch);

// Inverts xi_of_lambda by bracketed bisection; |xi1 - chi1| <= 1e-14 is
// treated as the LLN direction (lambda = infinity).
DualPoint lambda_of_xi(const ModelParams& params, const Velocity& xi);

// Solves t = psi_0(alpha+beta+lambda) - psi_0(lambda) for lambda; t = 0 maps
// to lambda = infinity (the LLN direction).
DualPoint lambda_of_tilt(const ModelParams& params, double t);

// Quenched and averaged rate functions on [0,1] (endpoints by their
// lambda -> 0 limits resp. continuity).
double rate_iq(const ModelParams& params, const Velocity& xi);
double rate_ia(const ModelParams& params, const Velocity& xi);

// Convex conjugate of I_q along h = t e1; the general direction
// h = t e1 + s e2 reduces through I_q^*(t e1 + s e2) = s + I_q^*((t-s) e1).
double iq_star(const ModelParams& params, double t);
double iq_star(const ModelParams& params, double t, double s);

// Mean Busemann increments (E[B_{0,e1}], E[B_{0,e2}]) in direction xi.
std::pair<double, double> busemann_means(const ModelParams& params, const Velocity& xi);

// Taylor data of I_q(chi1 + h) = c2 h^2 + c3 h^3 + c4 h^4 + O(h^5), the
// fourth-order coefficient of I_a, and the fourth derivative of I_q - I_a
// at chi (whose /24 is the quartic gap coefficient).
struct IqExpansion {
    double c2 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;
    double ia_c4 = 0.0;
    double gap_d4 = 0.0;
};
IqExpansion iq_expansion_coeffs(const ModelParams& params);

}  // namespace betawalk
