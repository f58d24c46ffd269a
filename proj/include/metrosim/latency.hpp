#pragma once

#include <map>
#include <string>
#include <vector>

#include "metrosim/topology.hpp"

namespace metrosim {

// Propagation, switching and per-VNF processing delays. Processing is keyed
// by VNF kind name ("ANALYTICS", "CSM", ...); kinds without an entry add
// nothing.
struct LatencyParams {
  double propagation_us_per_km = 5.0;
  double per_node_switching_us = 10.0;
  std::map<std::string, double> vnf_processing_ms = {{"ANALYTICS", 5.0}};

  static LatencyParams from_json(const json& j);
  json to_json() const;
};

// End-to-end latency in ms of an explicit node path:
//   sum(span km) * propagation + (interior node count) * switching
// plus the processing time of each traversed VNF kind. NO_PATH when
// consecutive nodes are not joined by an operational span.
double compute_latency(const Topology& topo,
                       const std::vector<std::string>& path_nodes,
                       const LatencyParams& params,
                       const std::vector<std::string>& processing_kinds);

}  // namespace metrosim
