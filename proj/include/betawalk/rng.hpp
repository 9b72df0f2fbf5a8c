// Counter-based random number generation.
//
// Every random quantity in the toolkit is a pure function of
// (seed, role, i, j) so that fields and experiments reproduce bitwise no
// matter in which order sites are visited, how work is split across threads,
// or how large the surrounding lattice is.  The generator is a chain of
// splitmix64 finalizer rounds over the key words; each round is an invertible
// mix with full avalanche, which is plenty for the statistical tests run here.

#pragma once

#include <cstdint>

namespace betawalk {

// Disjoint key spaces for the different random roles.  Keeping them apart
// guarantees e.g. that boundary uniforms never collide with bulk weights.
enum class RngRole : std::uint64_t {
    EnvOmega = 1,     // i.i.d. environment weights omega_{x,x+e1}
    BoundaryH = 2,    // axis uniforms Delta_{(i,0)} for horizontal edge ratios
    BoundaryV = 3,    // axis uniforms Delta_{(0,j)} for vertical edge ratios
    BulkPcheck = 4,   // backward bulk weights pcheck_{x,x-e1}
    PathStream = 5,   // sequential streams for path sampling
    Replica = 6,      // derivation of per-replica seeds
    Generic = 7,      // ad-hoc draws in tests and experiments
};

// splitmix64 finalizer: invertible 64-bit mix with full avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Stateless hash of (seed, role, i, j) -> 64 uniform bits.
inline std::uint64_t counter_hash(std::uint64_t seed, RngRole role, long i, long j) {
    std::uint64_t h = mix64(seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(role) + 1));
    h = mix64(h ^ (static_cast<std::uint64_t>(i) * 0x8CB92BA72F3D8DD7ULL + 0xD1B54A32D192ED03ULL));
    h = mix64(h ^ (static_cast<std::uint64_t>(j) * 0xABCC79572A3DBCF9ULL + 0x2545F4914F6CDD1DULL));
    return mix64(h);
}

// Uniform in the open interval (0,1): never returns 0 or 1 exactly.
inline double bits_to_open_unit(std::uint64_t h) {
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

inline double uniform_site(std::uint64_t seed, RngRole role, long i, long j) {
    return bits_to_open_unit(counter_hash(seed, role, i, j));
}

// Seed for replica r derived from a master seed; replicas are independent
// streams keyed off the Replica role.
inline std::uint64_t replica_seed(std::uint64_t seed, long r) {
    return counter_hash(seed, RngRole::Replica, r, 0);
}

// A sequential uniform stream (for path sampling).  Still counter-based:
// draw k of stream s is uniform_site(seed, PathStream, s, k), so replaying a
// stream is position-independent.
class RngStream {
  public:
    RngStream(std::uint64_t seed, long stream_id) : seed_(seed), stream_(stream_id) {}

    double next_u01() { return uniform_site(seed_, RngRole::PathStream, stream_, counter_++); }
    std::uint64_t seed() const { return seed_; }
    long stream_id() const { return stream_; }

  private:
    std::uint64_t seed_;
    long stream_;
    long counter_ = 0;
};

}  // namespace betawalk
