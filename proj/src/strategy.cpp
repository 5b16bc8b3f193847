#include "shardsim/strategy.hpp"

#include <algorithm>
#include <cmath>

#include "shardsim/error.hpp"

namespace shardsim {

int StrategyPlan::effective_subgroup(const ClusterTopology& topo) const {
  return subgroup_size > 0 ? subgroup_size : topo.gpus_per_node;
}

int StrategyPlan::shard_scope_gpus(const ClusterTopology& topo) const {
  if (kind == StrategyKind::MiCS) return effective_subgroup(topo);
  return topo.total_gpus();
}

int StrategyPlan::collective_scope_nodes(const ClusterTopology& topo) const {
  if (kind == StrategyKind::MiCS) {
    const int s = effective_subgroup(topo);
    return s >= topo.gpus_per_node ? s / topo.gpus_per_node : 1;
  }
  return topo.num_nodes;
}

int StrategyPlan::intra_ring_gpus(const ClusterTopology& topo) const {
  if (kind == StrategyKind::MiCS) return std::min(effective_subgroup(topo), topo.gpus_per_node);
  return topo.gpus_per_node;
}

void StrategyPlan::validate(const ClusterTopology& topo) const {
  if (kind == StrategyKind::MiCS) {
    const int s = effective_subgroup(topo);
    const int g = topo.gpus_per_node;
    if (s < 1 || topo.total_gpus() % s != 0)
      throw ConfigError("strategy.subgroup_size: must divide the total GPU count");
    if (s % g != 0 && g % s != 0)
      throw ConfigError("strategy.subgroup_size: must be a multiple of gpus_per_node or divide it");
  } else if (subgroup_size > 0) {
    throw ConfigError("strategy.subgroup_size: only valid for mics");
  }
  if (tau < 0.0 || tau > 1.0) throw ConfigError("strategy.tau: must be in [0,1]");
  if (tau != 0.0 && kind != StrategyKind::Fcdp && kind != StrategyKind::FcdpComm)
    throw ConfigError("strategy.tau: only valid for fcdp/fcdp-comm");
  if (host_cache_enabled && !(kind == StrategyKind::Fcdp || kind == StrategyKind::FcdpComm))
    throw ConfigError("strategy.host_cache_enabled: only valid for fcdp/fcdp-comm");
}

namespace {

std::uint64_t max_layer_bytes(const ModelSpec& model) {
  std::uint64_t m = 0;
  for (int l = 0; l < model.num_layers(); ++l) m = std::max(m, layer_bytes(model, l));
  return m;
}

bool reconstructs_layers(StrategyKind kind) { return kind != StrategyKind::Zero2; }

// Gathered-parameter transient at depth-1 prefetch: two full layers resident
// at once (one when the model has a single layer).
std::uint64_t gathered_transient_bytes(const StrategyPlan& plan, const ModelSpec& model) {
  if (!reconstructs_layers(plan.kind)) return 0;
  const std::uint64_t depth = model.num_layers() >= 2 ? 2 : 1;
  return depth * max_layer_bytes(model);
}

std::uint64_t activation_bytes(const ModelSpec& model, int batch) {
  return activation_bytes_per_sample_total(model) * static_cast<std::uint64_t>(batch);
}

}  // namespace

MemoryFootprint memory_footprint(const StrategyPlan& plan, const ModelSpec& model,
                                 const ClusterTopology& topo) {
  plan.validate(topo);
  model.validate();

  const std::uint64_t bytes_w = param_bytes(model);
  const std::uint64_t bytes_wt = trainable_param_bytes(model);
  const int G = topo.total_gpus();
  const int g = topo.gpus_per_node;

  MemoryFootprint fp;
  switch (plan.kind) {
    case StrategyKind::Zero2:
      fp.gpu_param_shard_bytes = bytes_w;  // params replicated on every GPU
      break;
    case StrategyKind::MiCS:
      fp.gpu_param_shard_bytes = bytes_w / static_cast<std::uint64_t>(plan.effective_subgroup(topo));
      break;
    default:
      fp.gpu_param_shard_bytes = bytes_w / static_cast<std::uint64_t>(G);
      break;
  }

  // Gradients and optimizer states cover only trainable parameters; frozen
  // parameters contribute neither.
  const int state_scope = plan.kind == StrategyKind::MiCS ? plan.effective_subgroup(topo) : G;
  fp.gpu_gradient_bytes = bytes_wt / static_cast<std::uint64_t>(state_scope);
  fp.gpu_optimizer_bytes = static_cast<std::uint64_t>(
      std::llround(model.optimizer_state_multiplier *
                   static_cast<double>(bytes_wt / static_cast<std::uint64_t>(state_scope))));
  fp.gpu_persistent_bytes =
      fp.gpu_param_shard_bytes + fp.gpu_gradient_bytes + fp.gpu_optimizer_bytes;

  if (plan.kind == StrategyKind::ZeroPP)
    fp.gpu_cache_bytes = bytes_w / static_cast<std::uint64_t>(g);
  if (plan.uses_host_cache()) fp.host_cache_bytes_per_node = bytes_w;

  fp.gpu_transient_peak_bytes =
      gathered_transient_bytes(plan, model) + activation_bytes(model, model.batch_per_gpu);
  return fp;
}

BatchSearchResult max_feasible_batch(const StrategyPlan& plan, const ModelSpec& model,
                                     const ClusterTopology& topo,
                                     std::uint64_t gpu_capacity_bytes) {
  const MemoryFootprint fp = memory_footprint(plan, model, topo);
  const std::uint64_t base =
      fp.gpu_persistent_bytes + fp.gpu_cache_bytes + gathered_transient_bytes(plan, model);
  const std::uint64_t act_per_sample = activation_bytes_per_sample_total(model);

  BatchSearchResult result;
  if (base + act_per_sample > gpu_capacity_bytes) {
    result.oom_at_batch_1 = true;
    return result;
  }
  // With zero activation coefficients any batch fits; cap the search.
  constexpr int kBatchCap = 1 << 20;
  int batch = 1;
  while (batch < kBatchCap &&
         base + act_per_sample * static_cast<std::uint64_t>(batch) * 2 <= gpu_capacity_bytes)
    batch *= 2;
  result.max_batch = batch;
  return result;
}

const char* to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Zero2:
      return "zero2";
    case StrategyKind::Zero3:
      return "zero3";
    case StrategyKind::MiCS:
      return "mics";
    case StrategyKind::ZeroPP:
      return "zeropp";
    case StrategyKind::Fcdp:
      return "fcdp";
    case StrategyKind::FcdpComm:
      return "fcdp-comm";
  }
  return "?";
}

StrategyKind strategy_kind_from_string(const std::string& s) {
  if (s == "zero2") return StrategyKind::Zero2;
  if (s == "zero3") return StrategyKind::Zero3;
  if (s == "mics") return StrategyKind::MiCS;
  if (s == "zeropp") return StrategyKind::ZeroPP;
  if (s == "fcdp") return StrategyKind::Fcdp;
  if (s == "fcdp-comm") return StrategyKind::FcdpComm;
  throw ConfigError("unknown strategy kind: " + s);
}

}  // namespace shardsim
