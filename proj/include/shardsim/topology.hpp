#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace shardsim {

enum class LinkKind { IntraGpu, HostGpu, InterNode };
enum class Duplex { FullDuplex, HalfDuplex };

// One link class of the commodity topology: the intra-node GPU fabric, the
// per-GPU host<->GPU channel, or the single per-node NIC. Bandwidth is a
// single effective scalar; an optional fixed per-transfer latency offset is
// accepted and defaults to zero.
struct LinkClass {
  LinkKind kind = LinkKind::InterNode;
  double bandwidth_bytes_per_s = 0.0;
  Duplex duplex = Duplex::FullDuplex;
  double latency_s = 0.0;
};

// Commodity cluster: N nodes, g GPUs each, one NIC per node, one host
// channel per GPU, a uniform intra-node ring fabric. Immutable after
// construction; safe to share across concurrent simulations.
struct ClusterTopology {
  int num_nodes = 1;
  int gpus_per_node = 1;
  LinkClass intra_gpu;
  LinkClass host_gpu;
  LinkClass inter_node;

  int total_gpus() const { return num_nodes * gpus_per_node; }
  const LinkClass& link(LinkKind kind) const;
  void validate() const;
};

// Named bandwidth presets. The *-measured presets are calibrated from
// measured 16 GiB transfer times (bandwidth = 16 GiB / latency); the
// *-theoretical presets are nominal link speeds.
LinkClass link_preset(const std::string& name);
std::vector<std::string> link_preset_names();

ClusterTopology make_topology(int num_nodes, int gpus_per_node,
                              const std::string& intra_preset = "nvlink3-theoretical",
                              const std::string& host_preset = "pcie4-measured",
                              const std::string& inter_preset = "ib100-rdma-measured");

double effective_bandwidth(const ClusterTopology& topo, LinkKind kind);

// size / effective bandwidth, plus the configured latency offset.
// Zero size is zero time regardless of the offset.
double transfer_time(std::uint64_t size_bytes, LinkKind kind, const ClusterTopology& topo);

const char* to_string(LinkKind kind);
const char* to_string(Duplex duplex);
LinkKind link_kind_from_string(const std::string& s);
Duplex duplex_from_string(const std::string& s);

}  // namespace shardsim
