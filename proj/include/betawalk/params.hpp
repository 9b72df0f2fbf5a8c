// Core model parameters and shared small types for the beta-environment
// random walk toolkit.
//
// The model lives on Z^2 with admissible steps e1=(1,0) and e2=(0,1).  The
// environment attaches to every site x an e1-step probability
// omega_{x,x+e1} ~ Beta(alpha, beta), i.i.d. across sites.  The law of large
// numbers velocity is chi = (alpha, beta)/(alpha+beta); velocities to the
// right of chi (xi1 > chi1) and to the left of it are handled by two branches
// of every dual formula.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace betawalk {

inline constexpr const char* kVersion = "1.0.0";

// Which side of the LLN velocity chi a velocity/dual parameter refers to.
enum class Branch : std::uint32_t {
    RightOfLLN = 0,  // xi1 > chi1, edge laws Beta(alpha+lambda, beta) etc.
    LeftOfLLN = 1,   // xi1 < chi1, obtained by swapping alpha<->beta and axes
    AtLLN = 2,       // xi = chi, lambda = infinity, rho == 1
};

inline const char* branch_name(Branch b) {
    switch (b) {
        case Branch::RightOfLLN: return "right";
        case Branch::LeftOfLLN: return "left";
        case Branch::AtLLN: return "at-lln";
    }
    return "?";
}

// Shape parameters (alpha, beta) of the beta environment.
struct ModelParams {
    double alpha = 1.0;
    double beta = 1.0;

    ModelParams() = default;
    ModelParams(double a, double b) : alpha(a), beta(b) {
        if (!(std::isfinite(a) && std::isfinite(b) && a > 0.0 && b > 0.0))
            throw std::domain_error("ModelParams: alpha and beta must be finite and > 0");
    }

    // First coordinate of the LLN velocity chi = (alpha, beta)/(alpha+beta).
    double chi1() const { return alpha / (alpha + beta); }
    double chi2() const { return beta / (alpha + beta); }

    ModelParams swapped() const { return ModelParams(beta, alpha); }
};

// A lattice site (i, j) >= (0, 0) on the quadrant.
struct Site {
    long i = 0;
    long j = 0;
    friend bool operator==(const Site&, const Site&) = default;
};

}  // namespace betawalk
