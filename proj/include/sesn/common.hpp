#pragma once

// Process-wide knobs and seed derivation shared by all modules. //

#include <cstddef>
#include <cstdint>

namespace sesn {

/// splitmix64 finalizer; the one-way mix behind every derived seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Domain tags keep the transfer matrix and the reservoir's initial state on
// unrelated random streams even when both are configured with the same seed.
namespace seed_domain {
inline constexpr std::uint64_t transfer_matrix = 0x74726e736d747278ull;
inline constexpr std::uint64_t reservoir_init = 0x696e697473746174ull;
}  // namespace seed_domain

/// Worker count used by the speckle kernels. Results are bitwise identical
/// for every value; this only trades wall time.
std::size_t num_threads() noexcept;

/// n = 0 restores the automatic default (hardware concurrency, capped).
void set_num_threads(std::size_t n) noexcept;

/// Upper bound on single large allocations (transfer matrix entries,
/// concatenated state histories). Oversized requests throw instead of
/// silently truncating.
std::size_t memory_budget_bytes() noexcept;
void set_memory_budget_bytes(std::size_t bytes) noexcept;

}  // namespace sesn
