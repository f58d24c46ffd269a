#include "metrosim/sim_state.hpp"

namespace metrosim {

SimState SimState::from_topology_doc(const json& doc,
                                     OpticalConfig optical_config) {
  SimState state;
  state.topology_doc = doc;
  LoadResult loaded = load_topology(doc);
  state.topo = std::move(loaded.topology);
  state.topology_warnings = std::move(loaded.warnings);
  state.optical = OpticalNetwork(std::move(optical_config));
  state.com = Com(state.topo);
  state.orch = Orchestrator(state.topo);
  return state;
}

json SimState::to_json() const {
  return json{{"topology", topology_doc},
              {"optical", optical.to_json()},
              {"com", com.to_json()},
              {"orchestrator", orch.to_json()}};
}

SimState SimState::from_json(const json& j) {
  check_fields(j, "state", {"topology", "optical", "com", "orchestrator"});
  SimState state = from_topology_doc(require_field(j, "state", "topology"));
  state.optical = OpticalNetwork::from_json(j.at("optical"));
  state.com = Com::from_json(state.topo, j.at("com"));
  state.orch = Orchestrator::from_json(j.at("orchestrator"));
  return state;
}

std::string SimState::snapshot() const { return to_json().dump(); }

}  // namespace metrosim
