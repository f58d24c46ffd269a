#include "metrosim/latency.hpp"

#include <cmath>
#include <cstdlib>

namespace metrosim {

LatencyParams LatencyParams::from_json(const json& j) {
  const std::string context = "latency_params";
  check_fields(j, context,
               {"propagation_us_per_km", "per_node_switching_us",
                "vnf_processing_ms"});
  LatencyParams p;
  if (auto v = opt_number(j, context, "propagation_us_per_km")) {
    p.propagation_us_per_km = *v;
  }
  if (auto v = opt_number(j, context, "per_node_switching_us")) {
    p.per_node_switching_us = *v;
  }
  if (j.contains("vnf_processing_ms")) {
    p.vnf_processing_ms.clear();
    for (const auto& [kind, ms] : j.at("vnf_processing_ms").items()) {
      if (!ms.is_number()) {
        fail(ErrorCode::ParseError, context + ": processing times are numbers");
      }
      p.vnf_processing_ms[kind] = ms.get<double>();
    }
  }
  if (p.propagation_us_per_km < 0.0 || p.per_node_switching_us < 0.0) {
    fail(ErrorCode::InvalidParams, "latency parameters must be non-negative");
  }
  for (const auto& [kind, ms] : p.vnf_processing_ms) {
    if (ms < 0.0) {
      fail(ErrorCode::InvalidParams, "latency parameters must be non-negative");
    }
  }
  return p;
}

json LatencyParams::to_json() const {
  return json{{"propagation_us_per_km", propagation_us_per_km},
              {"per_node_switching_us", per_node_switching_us},
              {"vnf_processing_ms", vnf_processing_ms}};
}

double compute_latency(const Topology& topo,
                       const std::vector<std::string>& path_nodes,
                       const LatencyParams& params,
                       const std::vector<std::string>& processing_kinds) {
  double microseconds = 0.0;
  for (std::size_t i = 0; i + 1 < path_nodes.size(); ++i) {
    int pa = topo.path_position(path_nodes[i]);
    int pz = topo.path_position(path_nodes[i + 1]);
    if (std::abs(pa - pz) != 1) {
      fail(ErrorCode::NoPath, "nodes '" + path_nodes[i] + "' and '" +
                                  path_nodes[i + 1] + "' are not adjacent");
    }
    const FiberSpan& s = topo.span(
        topo.ordered_span_ids[static_cast<std::size_t>(std::min(pa, pz))]);
    if (!s.operational) {
      fail(ErrorCode::NoPath, "span '" + s.id + "' is out of service");
    }
    microseconds += s.length_km * params.propagation_us_per_km;
  }
  if (path_nodes.size() > 2) {
    microseconds +=
        static_cast<double>(path_nodes.size() - 2) * params.per_node_switching_us;
  }
  double ms = microseconds / 1000.0;
  for (const std::string& kind : processing_kinds) {
    auto it = params.vnf_processing_ms.find(kind);
    if (it != params.vnf_processing_ms.end()) {
      ms += it->second;
    }
  }
  return ms;
}

}  // namespace metrosim
