#pragma once

#include <cstdint>
#include <string>

#include "shardsim/topology.hpp"
#include "shardsim/workload.hpp"

namespace shardsim {

enum class StrategyKind { Zero2, Zero3, MiCS, ZeroPP, Fcdp, FcdpComm };

// Shard layout and placement parameters of one training strategy.
struct StrategyPlan {
  StrategyKind kind = StrategyKind::Zero3;
  int subgroup_size = 0;  // MiCS only; 0 means "one subgroup per node" (= g)
  double tau = 0.0;       // Fcdp family: GPU-cache admission threshold in [0,1]
  bool host_cache_enabled = false;

  bool uses_host_cache() const {
    return kind == StrategyKind::Fcdp || kind == StrategyKind::FcdpComm || host_cache_enabled;
  }
  bool peft_aware() const { return kind == StrategyKind::FcdpComm; }

  // GPU count a parameter shard is spread over.
  int shard_scope_gpus(const ClusterTopology& topo) const;
  // Node count spanned by the strategy's inter collectives (1 means none).
  int collective_scope_nodes(const ClusterTopology& topo) const;
  // Ring size of intra-node collectives.
  int intra_ring_gpus(const ClusterTopology& topo) const;
  int effective_subgroup(const ClusterTopology& topo) const;

  void validate(const ClusterTopology& topo) const;
};

// Per-GPU / per-node memory footprint of a plan (analytical, tau = 0 view).
struct MemoryFootprint {
  std::uint64_t gpu_param_shard_bytes = 0;
  std::uint64_t gpu_gradient_bytes = 0;
  std::uint64_t gpu_optimizer_bytes = 0;
  std::uint64_t gpu_persistent_bytes = 0;  // shard + gradients + optimizer states
  std::uint64_t gpu_cache_bytes = 0;       // strategy-owned parameter cache
  std::uint64_t gpu_transient_peak_bytes = 0;  // gathered layers + activations at peak
  std::uint64_t host_cache_bytes_per_node = 0;

  std::uint64_t gpu_total_bytes() const {
    return gpu_persistent_bytes + gpu_cache_bytes + gpu_transient_peak_bytes;
  }
};

MemoryFootprint memory_footprint(const StrategyPlan& plan, const ModelSpec& model,
                                 const ClusterTopology& topo);

struct BatchSearchResult {
  int max_batch = 0;       // largest power-of-two batch that fits; 0 = OOM at batch 1
  bool oom_at_batch_1 = false;
};

// Powers-of-two search over the activation+transient footprint. Infeasibility
// is a value, not an error.
BatchSearchResult max_feasible_batch(const StrategyPlan& plan, const ModelSpec& model,
                                     const ClusterTopology& topo, std::uint64_t gpu_capacity_bytes);

const char* to_string(StrategyKind kind);
StrategyKind strategy_kind_from_string(const std::string& s);

}  // namespace shardsim
