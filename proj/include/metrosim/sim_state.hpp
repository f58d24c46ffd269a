#pragma once

#include <string>

#include "metrosim/nfv.hpp"
#include "metrosim/workload.hpp"

namespace metrosim {

// The whole mutable simulator state behind one CLI invocation: topology
// plus the optical, COM and orchestrator stores. Value semantics; a copy is
// a full snapshot.
struct SimState {
  json topology_doc;
  Topology topo;
  std::vector<std::string> topology_warnings;
  OpticalNetwork optical;
  Com com;
  Orchestrator orch;

  static SimState from_topology_doc(const json& doc,
                                    OpticalConfig optical_config = {});

  json to_json() const;
  static SimState from_json(const json& j);

  // Canonical serialized form, used for byte-identical snapshot checks.
  std::string snapshot() const;
};

}  // namespace metrosim
