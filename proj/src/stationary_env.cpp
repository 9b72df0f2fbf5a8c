#include "betawalk/stationary_env.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "betawalk/specfun.hpp"

namespace betawalk {

namespace {

constexpr char kMagic[4] = {'B', 'W', 'R', 'E'};
constexpr std::uint32_t kDumpVersion = 1;

double bulk_pcheck(const ModelParams& params, std::uint64_t seed, long i, long j) {
    return beta_inv_cdf(uniform_site(seed, RngRole::BulkPcheck, i, j), params.alpha,
                        params.beta);
}

// Nudge a ratio that rounded onto (or just past) the end of its legal open
// interval back inside; excursions beyond 1e-12 indicate a real defect.
double clamp_open(double value, double lo, double hi, long* clamp_count) {
    if (value > lo && value < hi) return value;
    if (value <= lo) {
        if (value < lo - 1e-12)
            throw std::runtime_error("build_stationary: emitted ratio left its legal interval");
        ++*clamp_count;
        return std::nextafter(lo, hi);
    }
    if (value > hi + 1e-12)
        throw std::runtime_error("build_stationary: emitted ratio left its legal interval");
    ++*clamp_count;
    return std::nextafter(hi, lo);
}

StationaryField build_stationary_right(const ModelParams& params, double lambda, long M,
                                       long N, std::uint64_t seed) {
    StationaryField field;
    field.params = params;
    field.lambda = lambda;
    field.branch = std::isinf(lambda) ? Branch::AtLLN : Branch::RightOfLLN;
    field.M = M;
    field.N = N;
    field.seed = seed;
    field.rho_h.resize(static_cast<std::size_t>(M) * (N + 1));
    field.rho_v.resize(static_cast<std::size_t>(M + 1) * N);
    field.omega_flipped.resize(static_cast<std::size_t>(M) * N);
    field.pcheck.resize(static_cast<std::size_t>(M) * N);

    auto& rho_h = field.rho_h;
    auto& rho_v = field.rho_v;
    const auto h_idx = [M](long i, long j) { return static_cast<std::size_t>(j) * M + i; };
    const auto v_idx = [M](long i, long j) { return static_cast<std::size_t>(j) * (M + 1) + i; };
    const auto c_idx = [M](long i, long j) { return static_cast<std::size_t>(j) * M + i; };

    for (long j = 1; j <= N; ++j)
        for (long i = 1; i <= M; ++i)
            field.pcheck[c_idx(i - 1, j - 1)] = bulk_pcheck(params, seed, i, j);

    if (std::isinf(lambda)) {
        // The LLN direction: rho == 1 and the flipped environment is the
        // reflected backward environment.
        for (auto& r : rho_h) r = 1.0;
        for (auto& r : rho_v) r = 1.0;
        for (long j = 0; j < N; ++j)
            for (long i = 0; i < M; ++i)
                field.omega_flipped[c_idx(i, j)] = field.pcheck[c_idx(i, j)];
        return field;
    }

    for (long i = 0; i < M; ++i)
        rho_h[h_idx(i, 0)] = detail::boundary_rho_h(params, lambda, seed, i);
    for (long j = 0; j < N; ++j)
        rho_v[v_idx(0, j)] = detail::boundary_rho_v(params, lambda, seed, j);

    // Corner flips in increasing i+j antidiagonals; flips within an
    // antidiagonal touch disjoint output edges.
    for (long d = 0; d <= M + N - 2; ++d) {
        const long i_lo = std::max(0L, d - (N - 1));
        const long i_hi = std::min(M - 1, d);
        for (long i = i_lo; i <= i_hi; ++i) {
            const long j = d - i;
            const auto [north, east, omega] = detail::corner_flip_cell(
                rho_h[h_idx(i, j)], rho_v[v_idx(i, j)], field.pcheck[c_idx(i, j)],
                &field.clamp_count);
            rho_h[h_idx(i, j + 1)] = north;
            rho_v[v_idx(i + 1, j)] = east;
            field.omega_flipped[c_idx(i, j)] = omega;
        }
    }
    return field;
}

}  // namespace

namespace detail {

std::tuple<double, double, double> corner_flip_cell(double south, double west, double w,
                                                    long* clamp_count) {
    const double s = w * west + (1.0 - w) * south;
    double north = s / west;
    double east = s / south;
    double omega = south * (west - 1.0) / (west - south);
    north = clamp_open(north, 0.0, 1.0, clamp_count);
    east = clamp_open(east, 1.0, std::numeric_limits<double>::max(), clamp_count);
    omega = clamp_open(omega, 0.0, 1.0, clamp_count);
    return {north, east, omega};
}

double boundary_rho_h(const ModelParams& params, double lambda, std::uint64_t seed, long i) {
    const double delta = uniform_site(seed, RngRole::BoundaryH, i + 1, 0);
    return beta_inv_cdf(delta, params.alpha + lambda, params.beta);
}

double boundary_rho_v(const ModelParams& params, double lambda, std::uint64_t seed, long j) {
    const double delta = uniform_site(seed, RngRole::BoundaryV, 0, j + 1);
    return 1.0 / beta_inv_cdf(delta, lambda, params.alpha);
}

}  // namespace detail

EnvField sample_env(const ModelParams& params, long M, long N, std::uint64_t seed,
                    long off_i, long off_j) {
    if (M < 0 || N < 0) throw std::domain_error("sample_env: dims must be nonnegative");
    EnvField env{params, M, N, seed, off_i, off_j, {}};
    env.omega_e1.resize(static_cast<std::size_t>(M + 1) * (N + 1));
    for (long j = 0; j <= N; ++j)
        for (long i = 0; i <= M; ++i)
            env.omega_e1[static_cast<std::size_t>(j) * (M + 1) + i] = beta_inv_cdf(
                uniform_site(seed, RngRole::EnvOmega, i + off_i, j + off_j), params.alpha,
                params.beta);
    return env;
}

std::tuple<double, double, double> involution_flip(double U, double V, double W) {
    if (!(U > 0.0 && U < 1.0 && V > 1.0 && W > 0.0 && W < 1.0))
        throw std::domain_error("involution_flip: need U in (0,1), V > 1, W in (0,1)");
    const double s = W * V + (1.0 - W) * U;
    return {s / V, s / U, U * (V - 1.0) / (V - U)};
}

StationaryField build_stationary(const ModelParams& params, double lambda, Branch branch,
                                 long M, long N, std::uint64_t seed) {
    if (M <= 0 || N <= 0) throw std::domain_error("build_stationary: dims must be positive");
    if (!(lambda > 0.0)) throw std::domain_error("build_stationary: lambda must be > 0");
    if (branch == Branch::AtLLN || std::isinf(lambda))
        return build_stationary_right(params, std::numeric_limits<double>::infinity(), M, N,
                                      seed);
    if (branch == Branch::RightOfLLN)
        return build_stationary_right(params, lambda, M, N, seed);

    // LeftOfLLN: build the RightOfLLN field with alpha and beta swapped on the
    // transposed rectangle, then swap the two axes back.
    const StationaryField g = build_stationary_right(params.swapped(), lambda, N, M, seed);
    StationaryField field;
    field.params = params;
    field.lambda = lambda;
    field.branch = Branch::LeftOfLLN;
    field.M = M;
    field.N = N;
    field.seed = seed;
    field.clamp_count = g.clamp_count;
    field.rho_h.resize(static_cast<std::size_t>(M) * (N + 1));
    field.rho_v.resize(static_cast<std::size_t>(M + 1) * N);
    field.omega_flipped.resize(static_cast<std::size_t>(M) * N);
    field.pcheck.resize(static_cast<std::size_t>(M) * N);
    for (long j = 0; j <= N; ++j)
        for (long i = 0; i < M; ++i)
            field.rho_h[static_cast<std::size_t>(j) * M + i] = g.rho_v_at(j, i);
    for (long j = 0; j < N; ++j)
        for (long i = 0; i <= M; ++i)
            field.rho_v[static_cast<std::size_t>(j) * (M + 1) + i] = g.rho_h_at(j, i);
    for (long j = 0; j < N; ++j)
        for (long i = 0; i < M; ++i) {
            field.omega_flipped[static_cast<std::size_t>(j) * M + i] = 1.0 - g.omega_at(j, i);
            field.pcheck[static_cast<std::size_t>(j) * M + i] =
                1.0 - g.pcheck_at(j + 1, i + 1);
        }
    return field;
}

double log_rho_point(const StationaryField& field, Site x, Site y) {
    const auto inside = [&](Site s) {
        return s.i >= 0 && s.i <= field.M && s.j >= 0 && s.j <= field.N;
    };
    if (!inside(x) || !inside(y))
        throw std::out_of_range("rho_point: site outside the field");
    double log_rho = 0.0;
    // Horizontal leg at height x.j from x.i to y.i.
    for (long i = std::min(x.i, y.i); i < std::max(x.i, y.i); ++i)
        log_rho += std::log(field.rho_h_at(i, x.j));
    if (y.i < x.i) log_rho = -log_rho;
    // Vertical leg at column y.i from x.j to y.j.
    double log_vert = 0.0;
    for (long j = std::min(x.j, y.j); j < std::max(x.j, y.j); ++j)
        log_vert += std::log(field.rho_v_at(y.i, j));
    if (y.j < x.j) log_vert = -log_vert;
    return log_rho + log_vert;
}

double rho_point(const StationaryField& field, Site x, Site y) {
    return std::exp(log_rho_point(field, x, y));
}

TransitionField doob_forward(const StationaryField& field) {
    TransitionField out;
    out.direction = TransitionField::Direction::Forward;
    out.i0 = 0;
    out.j0 = 0;
    out.M = field.M;
    out.N = field.N;
    out.p_e1.resize(static_cast<std::size_t>(field.M) * field.N);
    for (long j = 0; j < field.N; ++j)
        for (long i = 0; i < field.M; ++i)
            out.p_e1[static_cast<std::size_t>(j) * field.M + i] =
                field.omega_at(i, j) / field.rho_h_at(i, j);
    return out;
}

TransitionField doob_backward(const StationaryField& field) {
    TransitionField out;
    out.direction = TransitionField::Direction::Backward;
    out.i0 = 1;
    out.j0 = 1;
    out.M = field.M;
    out.N = field.N;
    out.p_e1.resize(static_cast<std::size_t>(field.M) * field.N);
    for (long j = 1; j <= field.N; ++j)
        for (long i = 1; i <= field.M; ++i)
            out.p_e1[static_cast<std::size_t>(j - 1) * field.M + (i - 1)] =
                field.pcheck_at(i, j) / field.rho_h_at(i - 1, j);
    return out;
}

double kappa_from_increments(double b_e1, double b_e2) {
    const double r1 = std::exp(b_e1);
    const double r2 = std::exp(b_e2);
    if (std::fabs(r2 - r1) < 1e-300)
        throw std::domain_error("kappa_from_increments: degenerate increments");
    if (!((r2 > 1.0 && r1 < 1.0) || (r1 > 1.0 && r2 < 1.0)))
        throw std::domain_error("kappa_from_increments: increments must straddle 0");
    return (r2 - 1.0) / (r2 - r1);
}

void dump_field(const StationaryField& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("dump_field: cannot open " + path);
    char header[64] = {};
    std::size_t pos = 0;
    const auto put = [&](const void* src, std::size_t n) {
        std::memcpy(header + pos, src, n);
        pos += n;
    };
    put(kMagic, 4);
    put(&kDumpVersion, 4);
    put(&field.params.alpha, 8);
    put(&field.params.beta, 8);
    put(&field.lambda, 8);
    const std::uint32_t branch = static_cast<std::uint32_t>(field.branch);
    put(&branch, 4);
    const std::uint64_t m = field.M, n = field.N;
    put(&m, 8);
    put(&n, 8);
    put(&field.seed, 8);
    out.write(header, sizeof header);
    const auto write_vec = [&](const std::vector<double>& v) {
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(v.size() * sizeof(double)));
    };
    write_vec(field.rho_h);
    write_vec(field.rho_v);
    write_vec(field.omega_flipped);
    write_vec(field.pcheck);
    if (!out) throw std::runtime_error("dump_field: write failed for " + path);
}

StationaryField load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_field: cannot open " + path);
    char header[64] = {};
    in.read(header, sizeof header);
    if (!in || std::memcmp(header, kMagic, 4) != 0)
        throw std::runtime_error("load_field: bad magic in " + path);
    std::size_t pos = 4;
    const auto get = [&](void* dst, std::size_t n) {
        std::memcpy(dst, header + pos, n);
        pos += n;
    };
    std::uint32_t version = 0;
    get(&version, 4);
    if (version != kDumpVersion) throw std::runtime_error("load_field: unsupported version");
    StationaryField field;
    double alpha = 0, beta = 0;
    get(&alpha, 8);
    get(&beta, 8);
    field.params = ModelParams(alpha, beta);
    get(&field.lambda, 8);
    std::uint32_t branch = 0;
    get(&branch, 4);
    field.branch = static_cast<Branch>(branch);
    std::uint64_t m = 0, n = 0;
    get(&m, 8);
    get(&n, 8);
    get(&field.seed, 8);
    field.M = static_cast<long>(m);
    field.N = static_cast<long>(n);
    const auto read_vec = [&](std::vector<double>& v, std::size_t count) {
        v.resize(count);
        in.read(reinterpret_cast<char*>(v.data()),
                static_cast<std::streamsize>(count * sizeof(double)));
    };
    read_vec(field.rho_h, static_cast<std::size_t>(field.M) * (field.N + 1));
    read_vec(field.rho_v, static_cast<std::size_t>(field.M + 1) * field.N);
    read_vec(field.omega_flipped, static_cast<std::size_t>(field.M) * field.N);
    read_vec(field.pcheck, static_cast<std::size_t>(field.M) * field.N);
    if (!in) throw std::runtime_error("load_field: truncated file " + path);
    return field;
}

StreamingBuilder::StreamingBuilder(const ModelParams& params, double lambda,
                                   std::uint64_t seed)
    : params_(params), lambda_(lambda), seed_(seed) {
    if (!(lambda > 0.0 && std::isfinite(lambda)))
        throw std::domain_error("StreamingBuilder: lambda must be finite and > 0");
}

void StreamingBuilder::extend_right() {
    long clamp = 0;
    double south = detail::boundary_rho_h(params_, lambda_, seed_, W_);
    for (long j = 0; j < J_; ++j) {
        const double w = bulk_pcheck(params_, seed_, W_ + 1, j + 1);
        const auto [north, east, omega] = detail::corner_flip_cell(south, right_rho_v_[j], w, &clamp);
        right_rho_v_[j] = east;
        if (j == J_ - 1) pi_e1_last_ = omega / south;
        south = north;
    }
    top_rho_h_.push_back(south);
    ++W_;
}

void StreamingBuilder::extend_up() {
    long clamp = 0;
    double west = detail::boundary_rho_v(params_, lambda_, seed_, J_);
    for (long i = 0; i < W_; ++i) {
        const double w = bulk_pcheck(params_, seed_, i + 1, J_ + 1);
        const auto [north, east, omega] = detail::corner_flip_cell(top_rho_h_[i], west, w, &clamp);
        if (i == W_ - 1) pi_e1_last_ = omega / top_rho_h_[i];
        top_rho_h_[i] = north;
        west = east;
    }
    right_rho_v_.push_back(west);
    ++J_;
}

void StreamingBuilder::ensure(long i, long j) {
    while (W_ <= i) extend_right();
    while (J_ <= j) extend_up();
}

double streaming_log_rho(const ModelParams& params, double lambda, long m, long n,
                         std::uint64_t seed) {
    if (m <= 0 || n <= 0) throw std::domain_error("streaming_log_rho: dims must be positive");
    long clamp = 0;
    std::vector<double> top(m);
    double log_rho = 0.0;
    for (long i = 0; i < m; ++i) {
        top[i] = detail::boundary_rho_h(params, lambda, seed, i);
        log_rho += std::log(top[i]);
    }
    for (long j = 0; j < n; ++j) {
        double west = detail::boundary_rho_v(params, lambda, seed, j);
        for (long i = 0; i < m; ++i) {
            const double w = bulk_pcheck(params, seed, i + 1, j + 1);
            const auto [north, east, omega] = detail::corner_flip_cell(top[i], west, w, &clamp);
            top[i] = north;
            west = east;
        }
        log_rho += std::log(west);
    }
    return log_rho;
}

}  // namespace betawalk
