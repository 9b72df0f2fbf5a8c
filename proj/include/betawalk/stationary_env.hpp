// Sampling of i.i.d. beta environments and the corner-flip construction of
// increment-stationary harmonic edge-ratio fields rho^lambda on a quadrant,
// together with their Doob-transformed forward and backward transition
// fields.
//
// Geometry and conventions
// ------------------------
// The field lives on the sites [0,M] x [0,N].  Horizontal edges carry ratios
// rho_h(i,j) = rho_{(i,j),(i+1,j)} and vertical edges carry
// rho_v(i,j) = rho_{(i,j),(i,j+1)}.  On the RightOfLLN branch,
// rho_h ~ Beta(alpha+lambda, beta) takes values in (0,1) while
// 1/rho_v ~ Beta(lambda, alpha), so rho_v > 1.  The axes are seeded by
// inverse-CDF coupling to site uniforms Delta; the bulk is filled by corner
// flips: the unit square with southwest corner (i,j) consumes the ratios on
// its south and west edges plus the backward weight pcheck at its northeast
// corner and emits the ratios on its north and east edges plus the flipped
// forward weight omega^lambda at the southwest corner:
//
//   s = w*b + (1-w)*a,   north = s/b,   east = s/a,
//   omega^lambda_{x,x+e1} = a*(b-1)/(b-a),
//
// with a = rho_h(i,j), b = rho_v(i,j), w = pcheck(i+1,j+1).  The LeftOfLLN
// branch is realized by building the RightOfLLN field with alpha and beta
// swapped and transposing the two axes.

#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "betawalk/params.hpp"
#include "betawalk/rng.hpp"

namespace betawalk {

// A rectangular lattice of i.i.d. environment weights omega_{x,x+e1} on the
// sites [0,M] x [0,N], reproducible from (seed, offsets).
struct EnvField {
    ModelParams params;
    long M = 0, N = 0;
    std::uint64_t seed = 0;
    long off_i = 0, off_j = 0;  // lattice shift applied as an index offset
    std::vector<double> omega_e1;  // (M+1) x (N+1), row-major in i

    double omega(long i, long j) const { return omega_e1[static_cast<std::size_t>(j) * (M + 1) + i]; }
};

EnvField sample_env(const ModelParams& params, long M, long N, std::uint64_t seed,
                    long off_i = 0, long off_j = 0);

// Forward (steps +e1/+e2 from sites [i0, i0+M) x [j0, j0+N)) or backward
// (steps -e1/-e2) transition probabilities.
struct TransitionField {
    enum class Direction { Forward, Backward };
    Direction direction = Direction::Forward;
    long i0 = 0, j0 = 0;  // first site covered
    long M = 0, N = 0;    // number of sites covered in each direction
    std::vector<double> p_e1;  // M x N, row-major in i

    double p(long i, long j) const {
        return p_e1[static_cast<std::size_t>(j - j0) * M + (i - i0)];
    }
    bool covers(long i, long j) const {
        return i >= i0 && i < i0 + M && j >= j0 && j < j0 + N;
    }
};

// The boundary-seeded stationary harmonic field with its flipped forward
// environment and the retained backward bulk weights.
struct StationaryField {
    ModelParams params;
    double lambda = 1.0;
    Branch branch = Branch::RightOfLLN;
    long M = 0, N = 0;
    std::uint64_t seed = 0;
    long clamp_count = 0;  // emitted ratios nudged back into their open interval

    std::vector<double> rho_h;          // edges ((i,j),(i+1,j)): M x (N+1)
    std::vector<double> rho_v;          // edges ((i,j),(i,j+1)): (M+1) x N
    std::vector<double> omega_flipped;  // omega^lambda e1-weight at (i,j): M x N
    std::vector<double> pcheck;         // backward e1-weight at (i,j), i,j >= 1: M x N

    double rho_h_at(long i, long j) const { return rho_h[static_cast<std::size_t>(j) * M + i]; }
    double rho_v_at(long i, long j) const { return rho_v[static_cast<std::size_t>(j) * (M + 1) + i]; }
    double omega_at(long i, long j) const { return omega_flipped[static_cast<std::size_t>(j) * M + i]; }
    double pcheck_at(long i, long j) const {
        return pcheck[static_cast<std::size_t>(j - 1) * M + (i - 1)];
    }
};

// The involution (U,V,W) -> (U',V',W') on (0,1) x (1,inf) x (0,1).
std::tuple<double, double, double> involution_flip(double U, double V, double W);

// Corner-flip construction of the stationary field.  lambda may be infinite
// (the LLN direction), in which case rho == 1 and omega^lambda is the
// reflected backward environment.
StationaryField build_stationary(const ModelParams& params, double lambda, Branch branch,
                                 long M, long N, std::uint64_t seed);

// The cocycle rho_{x,y}: product of edge ratios along the staircase
// x -> (y1, x2) -> y, inverting ratios traversed backward.  Path-independent
// by plaquette closure.
double rho_point(const StationaryField& field, Site x, Site y);
double log_rho_point(const StationaryField& field, Site x, Site y);

// Doob transforms: forward pi^lambda on sites [0,M) x [0,N) and backward
// pi-check^lambda on sites [1,M] x [1,N].
TransitionField doob_forward(const StationaryField& field);
TransitionField doob_backward(const StationaryField& field);

// kappa from Busemann increments: (e^{B_{e2}} - 1) / (e^{B_{e2}} - e^{B_{e1}}).
double kappa_from_increments(double b_e1, double b_e2);

// Binary field dump (little-endian doubles, row-major, 64-byte header) and
// its inverse.
void dump_field(const StationaryField& field, const std::string& path);
StationaryField load_field(const std::string& path);

// O(max(M,N))-memory streaming builder for the RightOfLLN corner-flip
// construction.  The built region is always a rectangle of unit cells
// [0,W) x [0,J); it grows one column (extend_right) or one row (extend_up)
// at a time and reproduces the full builder bitwise for every cell it emits.
class StreamingBuilder {
  public:
    StreamingBuilder(const ModelParams& params, double lambda, std::uint64_t seed);

    // Ensure the cell rectangle [0,i] x [0,j] is built; the site (i,j) then
    // has both its outgoing edge ratios and its forward Doob weight defined.
    void ensure(long i, long j);

    long width() const { return W_; }
    long height() const { return J_; }

    // Forward Doob e1-probability at the most recently completed cell
    // (only meaningful right after an ensure() that grew the rectangle
    // towards the queried site, i.e. along a sampled up-right path).
    double pi_e1_last() const { return pi_e1_last_; }

    // Edge profiles of the built rectangle: rho_h(i, J) for i < W and
    // rho_v(W, j) for j < J.
    const std::vector<double>& top_rho_h() const { return top_rho_h_; }
    const std::vector<double>& right_rho_v() const { return right_rho_v_; }

  private:
    void extend_right();
    void extend_up();

    ModelParams params_;
    double lambda_;
    std::uint64_t seed_;
    long W_ = 0, J_ = 0;
    double pi_e1_last_ = 0.0;
    std::vector<double> top_rho_h_;
    std::vector<double> right_rho_v_;
};

// Streaming evaluation of log rho^lambda_{0,(m,n)} (RightOfLLN branch) with
// O(m) memory: bottom boundary plus the east edges of column m.
double streaming_log_rho(const ModelParams& params, double lambda, long m, long n,
                         std::uint64_t seed);

namespace detail {

// One corner flip; shared by the full and streaming builders so their
// floating-point results agree bitwise.  Returns (north, east, omega_e1) and
// bumps clamp_count when an emitted ratio is nudged back into its interval.
std::tuple<double, double, double> corner_flip_cell(double south, double west, double w,
                                                    long* clamp_count);

// Boundary edge ratios of the RightOfLLN construction.
double boundary_rho_h(const ModelParams& params, double lambda, std::uint64_t seed, long i);
double boundary_rho_v(const ModelParams& params, double lambda, std::uint64_t seed, long j);

}  // namespace detail

}  // namespace betawalk
