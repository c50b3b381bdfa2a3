#pragma once

#include <array>
#include <cstdint>

namespace mlmc {

// Philox4x32-10 keyed counter permutation. Counter-based so that any
// (seed, domain, index) triple addresses an independent stream and the whole
// simulation is reproducible bit-for-bit regardless of scheduling.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// Stream domains keep unrelated consumers of the same master seed apart.
namespace rng_domain {
inline constexpr std::uint32_t kLevelBase = 0;        // + level index for MLMC samples
inline constexpr std::uint32_t kReplication = 1u << 16;
inline constexpr std::uint32_t kValidation = 2u << 16;
inline constexpr std::uint32_t kAssumptionScan = 3u << 16;
}  // namespace rng_domain

// Derives a fresh 64-bit seed from (master, domain, index); used to give each
// estimator replication its own master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint32_t domain, std::uint64_t index);

class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint32_t domain, std::uint64_t index);

    std::uint64_t next_u64();
    // uniform on [0, 1) with 53 random bits
    double next_double();
    // standard normal via a 256-layer ziggurat
    double next_normal();
    // batched normals; same sequence as repeated next_normal() calls
    void fill_normals(double* out, std::size_t count);

  private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    // four blocks are generated per refill; the independent counter chains
    // pipeline the multiply latency of the rounds
    std::array<std::uint64_t, 8> buf_{};
    int have_ = 0;  // unread u64 values in buf_
};

}  // namespace mlmc
