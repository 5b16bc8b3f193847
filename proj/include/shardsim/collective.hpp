#pragma once

#include <cassert>
#include <cstdint>

namespace shardsim {

inline constexpr std::uint64_t kKiB = 1024ull;
inline constexpr std::uint64_t kMiB = kKiB * 1024;
inline constexpr std::uint64_t kGiB = kMiB * 1024;

// Byte-splitting conventions for bulk-synchronous collectives over evenly
// sharded payloads. Every byte count in the analytical model and in the
// simulator flows through these two helpers, so reconciliation can demand
// integer equality rather than a tolerance.

// Bytes crossing one node's NIC for an all-gather (or reduce-scatter) of
// `payload` bytes sharded across `scope_nodes` nodes: floor(payload*(n-1)/n).
inline std::uint64_t ag_inter_bytes(std::uint64_t payload, int scope_nodes) {
  assert(scope_nodes >= 1);
  if (scope_nodes <= 1) return 0;
  const std::uint64_t n = static_cast<std::uint64_t>(scope_nodes);
  return payload / n * (n - 1) + payload % n * (n - 1) / n;
}

// Per-GPU bytes moved by a ring all-gather of `payload` bytes across
// `ring_gpus` ranks: floor(payload*(k-1)/k).
inline std::uint64_t ring_intra_bytes(std::uint64_t payload, int ring_gpus) {
  assert(ring_gpus >= 1);
  if (ring_gpus <= 1) return 0;
  const std::uint64_t k = static_cast<std::uint64_t>(ring_gpus);
  return payload / k * (k - 1) + payload % k * (k - 1) / k;
}

}  // namespace shardsim
