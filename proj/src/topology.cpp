#include "shardsim/topology.hpp"

#include <array>

#include "shardsim/collective.hpp"
#include "shardsim/error.hpp"

namespace shardsim {

namespace {

constexpr double kCalibrationPayload = 16.0 * static_cast<double>(kGiB);

struct PresetRow {
  const char* name;
  LinkKind kind;
  double bandwidth;  // bytes per second
};

// Measured rows derive bandwidth from the time a 16 GiB payload took on that
// path; theoretical rows are nominal link speeds.
const std::array<PresetRow, 8>& preset_table() {
  static const std::array<PresetRow, 8> rows = {{
      {"pcie4-measured", LinkKind::HostGpu, kCalibrationPayload / 0.613},
      {"pcie4-theoretical", LinkKind::HostGpu, 32.0e9},
      {"nvlink3-theoretical", LinkKind::IntraGpu, 200.0e9},
      {"ib100-rdma-measured", LinkKind::InterNode, kCalibrationPayload / 0.949},
      {"ib100-ipoib-measured", LinkKind::InterNode, kCalibrationPayload / 3.963},
      {"eth10g-measured", LinkKind::InterNode, kCalibrationPayload / 6.745},
      {"eth1g-measured", LinkKind::InterNode, kCalibrationPayload / 67.66},
      {"eth100g-theoretical", LinkKind::InterNode, 12.5e9},
  }};
  return rows;
}

}  // namespace

const LinkClass& ClusterTopology::link(LinkKind kind) const {
  switch (kind) {
    case LinkKind::IntraGpu:
      return intra_gpu;
    case LinkKind::HostGpu:
      return host_gpu;
    case LinkKind::InterNode:
      return inter_node;
  }
  throw ConfigError("topology: unknown link class");
}

void ClusterTopology::validate() const {
  if (num_nodes < 1) throw ConfigError("topology.num_nodes: must be >= 1");
  if (gpus_per_node < 1) throw ConfigError("topology.gpus_per_node: must be >= 1");
  for (LinkKind k : {LinkKind::IntraGpu, LinkKind::HostGpu, LinkKind::InterNode}) {
    const LinkClass& lc = link(k);
    if (lc.bandwidth_bytes_per_s <= 0.0)
      throw ConfigError(std::string("topology.") + to_string(k) + ": bandwidth must be > 0");
    if (lc.latency_s < 0.0)
      throw ConfigError(std::string("topology.") + to_string(k) + ": latency must be >= 0");
    if (lc.kind != k)
      throw ConfigError(std::string("topology.") + to_string(k) + ": preset is for a different link class");
  }
}

LinkClass link_preset(const std::string& name) {
  for (const PresetRow& row : preset_table()) {
    if (name == row.name) {
      LinkClass lc;
      lc.kind = row.kind;
      lc.bandwidth_bytes_per_s = row.bandwidth;
      lc.duplex = Duplex::FullDuplex;
      lc.latency_s = 0.0;
      return lc;
    }
  }
  throw ConfigError("unknown link preset: " + name);
}

std::vector<std::string> link_preset_names() {
  std::vector<std::string> names;
  for (const PresetRow& row : preset_table()) names.emplace_back(row.name);
  return names;
}

ClusterTopology make_topology(int num_nodes, int gpus_per_node, const std::string& intra_preset,
                              const std::string& host_preset, const std::string& inter_preset) {
  ClusterTopology topo;
  topo.num_nodes = num_nodes;
  topo.gpus_per_node = gpus_per_node;
  topo.intra_gpu = link_preset(intra_preset);
  topo.host_gpu = link_preset(host_preset);
  topo.inter_node = link_preset(inter_preset);
  topo.validate();
  return topo;
}

double effective_bandwidth(const ClusterTopology& topo, LinkKind kind) {
  return topo.link(kind).bandwidth_bytes_per_s;
}

double transfer_time(std::uint64_t size_bytes, LinkKind kind, const ClusterTopology& topo) {
  if (size_bytes == 0) return 0.0;
  const LinkClass& lc = topo.link(kind);
  return lc.latency_s + static_cast<double>(size_bytes) / lc.bandwidth_bytes_per_s;
}

const char* to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::IntraGpu:
      return "intra_gpu";
    case LinkKind::HostGpu:
      return "host_gpu";
    case LinkKind::InterNode:
      return "inter_node";
  }
  return "?";
}

const char* to_string(Duplex duplex) {
  return duplex == Duplex::FullDuplex ? "full" : "half";
}

LinkKind link_kind_from_string(const std::string& s) {
  if (s == "intra_gpu") return LinkKind::IntraGpu;
  if (s == "host_gpu") return LinkKind::HostGpu;
  if (s == "inter_node") return LinkKind::InterNode;
  throw ConfigError("unknown link class: " + s);
}

Duplex duplex_from_string(const std::string& s) {
  if (s == "full") return Duplex::FullDuplex;
  if (s == "half") return Duplex::HalfDuplex;
  throw ConfigError("unknown duplex mode: " + s + " (expected full|half)");
}

}  // namespace shardsim
