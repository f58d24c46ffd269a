#pragma once

#include <string>
#include <vector>

#include "metrosim/sim_state.hpp"

namespace metrosim::testing {

// The 5-node horseshoe used across the suites:
// MCEN1 -40- AMEN1 -80- AMEN2 -60- AMEN3 -120- MCEN2, blockers everywhere.
inline json demo5_doc() {
  return json::parse(R"({
    "nodes": [
      {"id": "MCEN1", "kind": "MCEN", "amp_variant": "EDFA", "has_blocker": true,
       "dc": {"tier": "RDC", "cpu_cores": 64, "ram_gb": 256, "storage_tb": 100.0},
       "transponders": ["B"]},
      {"id": "AMEN1", "kind": "AMEN", "amp_variant": "EDFA", "has_blocker": true,
       "dc": {"tier": "EDC", "cpu_cores": 32, "ram_gb": 64, "storage_tb": 20.0},
       "transponders": ["A"]},
      {"id": "AMEN2", "kind": "AMEN", "amp_variant": "SOA_LOSSLESS", "has_blocker": true,
       "dc": {"tier": "EDC", "cpu_cores": 32, "ram_gb": 64, "storage_tb": 20.0},
       "transponders": ["A"]},
      {"id": "AMEN3", "kind": "AMEN", "amp_variant": "EDFA", "has_blocker": true,
       "dc": {"tier": "EDC", "cpu_cores": 32, "ram_gb": 64, "storage_tb": 20.0},
       "transponders": ["A"]},
      {"id": "MCEN2", "kind": "MCEN", "amp_variant": "EDFA", "has_blocker": true,
       "dc": {"tier": "CDC", "cpu_cores": 128, "ram_gb": 512, "storage_tb": 500.0},
       "transponders": ["B"]}
    ],
    "spans": [
      {"id": "s1", "a": "MCEN1", "z": "AMEN1", "length_km": 40.0},
      {"id": "s2", "a": "AMEN1", "z": "AMEN2", "length_km": 80.0},
      {"id": "s3", "a": "AMEN2", "z": "AMEN3", "length_km": 60.0},
      {"id": "s4", "a": "AMEN3", "z": "MCEN2", "length_km": 120.0}
    ],
    "grid": {"channel_count": 80, "channel_spacing_ghz": 50.0,
             "base_frequency_thz": 191.6}
  })");
}

// Same shape with selectable blocker placement (node id -> has_blocker).
inline json demo5_doc_with_blockers(const std::vector<std::string>& blocked) {
  json doc = demo5_doc();
  for (json& n : doc["nodes"]) {
    bool has = false;
    for (const std::string& id : blocked) {
      if (n["id"] == id) {
        has = true;
        break;
      }
    }
    n["has_blocker"] = has;
  }
  return doc;
}

// Minimal single-segment loss system: two MCENs, one short span, one
// vendor-B transponder each, truncatable grid.
inline json two_node_doc(int channel_count) {
  json doc = json::parse(R"({
    "nodes": [
      {"id": "MCEN1", "kind": "MCEN", "transponders": ["B"]},
      {"id": "MCEN2", "kind": "MCEN", "transponders": ["B"]}
    ],
    "spans": [
      {"id": "s1", "a": "MCEN1", "z": "MCEN2", "length_km": 40.0}
    ],
    "grid": {"channel_count": 80, "channel_spacing_ghz": 50.0,
             "base_frequency_thz": 191.6}
  })");
  doc["grid"]["channel_count"] = channel_count;
  return doc;
}

inline Topology demo5() { return load_topology(demo5_doc()).topology; }

inline json default_nsd_doc() {
  return load_json_file(std::string(METROSIM_DATA_DIR) +
                        "/surveillance_nsd.json");
}

}  // namespace metrosim::testing
