#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shardsim/strategy.hpp"
#include "shardsim/topology.hpp"
#include "shardsim/workload.hpp"

namespace shardsim {

enum class EventKind {
  AgInter,
  AgIntra,
  H2D,
  D2H,
  ComputeFwd,
  ComputeBwd,
  ReduceScatter,
  OptimizerStep,
  MaskDirty,
  Broadcast,
};

enum class ParamSet { All, TrainableOnly, FrozenOnly };

using EventId = std::uint32_t;

struct Event {
  EventId id = 0;
  EventKind kind = EventKind::ComputeFwd;
  int layer = -1;  // -1: not layer-scoped
  ParamSet param_set = ParamSet::All;
  std::uint64_t bytes_total = 0;  // payload bytes of the (layer, param_set) slice
  std::vector<EventId> deps;
};

// Cache-coherence state of one sharded parameter portion. A layer owns up to
// two portions: its trainable slice and its frozen slice. The frozen
// portion's version stays at 0 for the lifetime of a run.
struct ParamState {
  int layer = 0;
  bool frozen = false;
  std::uint64_t version = 0;
  bool dirty = true;
  std::optional<std::uint64_t> host_cached_version;
  bool gpu_cached = false;
};

// One iteration's ordered event DAG plus per-layer annotations describing
// which forward path each layer took and which layers were tau-admitted to
// stay resident on the GPU through the backward pass.
struct EventProgram {
  std::uint64_t iteration_index = 1;  // 1-based
  StrategyKind strategy = StrategyKind::Zero3;
  std::vector<Event> events;
  std::vector<char> layer_retained;    // gathered params kept on GPU until backward
  std::vector<char> layer_clean_path;  // any portion served from the host cache
  std::vector<char> layer_dirty_path;  // any portion re-gathered inter-node
};

struct BuildOptions {
  bool prefetch = true;
  std::uint64_t gpu_capacity_bytes = 0;  // 0 = unlimited (tau admission always passes)
};

// Two states per layer when the layer has both trainable and frozen bytes,
// ordered (layer, trainable-portion, frozen-portion). All portions start
// dirty: no cached values exist yet.
std::vector<ParamState> init_param_states(const ModelSpec& model);

EventProgram build_iteration(const StrategyPlan& plan, const ModelSpec& model,
                             const ClusterTopology& topo, const std::vector<ParamState>& states,
                             std::uint64_t iteration_index, const BuildOptions& opts = {});

// Applies the program's bookkeeping effects to the protocol state: host cache
// refreshes at D2H, version bumps at the optimizer step, dirty marks at
// MaskDirty. GPU retention does not outlive the iteration.
std::vector<ParamState> step_state(std::vector<ParamState> states, const EventProgram& program);

// One line per event: id, kind, layer, param_set, bytes, deps. Used for
// golden-file pinning; byte-for-byte deterministic.
std::string serialize_program(const EventProgram& program);

const char* to_string(EventKind kind);
const char* to_string(ParamSet set);

// Index of a layer portion in the canonical state list, or -1 if the layer
// has no such portion.
int param_state_index(const std::vector<ParamState>& states, int layer, bool frozen);

}  // namespace shardsim
