#pragma once

#include <cstdint>

#include "shardsim/strategy.hpp"
#include "shardsim/topology.hpp"
#include "shardsim/workload.hpp"

namespace shardsim {

// Closed-form per-iteration communication volumes. Inter-node fields are
// bytes through one node's NIC; intra_node_total is per-GPU ring traffic;
// h2d/d2h totals are bytes per node across its host channels.
struct CommVolume {
  std::uint64_t fwd_ag_inter = 0;
  std::uint64_t bwd_ag_inter = 0;
  std::uint64_t reduce_scatter_inter = 0;
  std::uint64_t param_sync_inter = 0;  // ZeRO-2 post-step broadcast
  std::uint64_t intra_node_total = 0;
  std::uint64_t h2d_total = 0;
  std::uint64_t d2h_total = 0;

  std::uint64_t inter_total() const {
    return fwd_ag_inter + bwd_ag_inter + reduce_scatter_inter + param_sync_inter;
  }
};

// Analytical volumes for the given iteration (1-based). Iterations >= 2 are
// steady state. tau-admission effects are not modeled here: volumes are the
// tau = 0 values, which upper-bound the host-channel traffic at tau > 0.
CommVolume comm_volume(const StrategyPlan& plan, const ModelSpec& model,
                       const ClusterTopology& topo, std::uint64_t iteration);

// Serial lower bound on steady-state iteration time assuming perfect overlap
// between compute and every link class: the max of the per-resource busy
// times. A bound, not a prediction; the simulator refines it.
double iteration_time_estimate(const StrategyPlan& plan, const ModelSpec& model,
                               const ClusterTopology& topo);

}  // namespace shardsim
