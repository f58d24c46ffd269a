#include "metrosim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace metrosim {

const char* node_kind_name(NodeKind k) {
  return k == NodeKind::Amen ? "AMEN" : "MCEN";
}

const char* amp_variant_name(AmpVariant v) {
  return v == AmpVariant::Edfa ? "EDFA" : "SOA_LOSSLESS";
}

const char* dc_tier_name(DcTier t) {
  switch (t) {
    case DcTier::Edc: return "EDC";
    case DcTier::Rdc: return "RDC";
    case DcTier::Cdc: return "CDC";
  }
  return "?";
}

const char* vendor_name(Vendor v) { return v == Vendor::A ? "A" : "B"; }

const char* format_name_str(FormatName f) {
  switch (f) {
    case FormatName::DpQpsk: return "DP-QPSK";
    case FormatName::Dp16Qam: return "DP-16QAM";
    case FormatName::Dp64Qam: return "DP-64QAM";
  }
  return "?";
}

FormatName parse_format_name(const std::string& s) {
  if (s == "DP-QPSK") return FormatName::DpQpsk;
  if (s == "DP-16QAM") return FormatName::Dp16Qam;
  if (s == "DP-64QAM") return FormatName::Dp64Qam;
  fail(ErrorCode::ParseError, "unknown modulation format '" + s + "'");
}

TransponderType TransponderType::for_vendor(Vendor v) {
  TransponderType t;
  t.vendor = v;
  if (v == Vendor::A) {
    // Commercial dual-wavelength device, 100/200 Gb/s per wavelength.
    t.wavelengths = 2;
    t.formats = {FormatName::DpQpsk, FormatName::Dp16Qam};
    t.openconfig_native = true;
  } else {
    // Lab device, arbitrary modulation up to DP-64QAM, project agent.
    t.wavelengths = 1;
    t.formats = {FormatName::DpQpsk, FormatName::Dp16Qam, FormatName::Dp64Qam};
    t.openconfig_native = false;
  }
  return t;
}

bool TransponderType::supports(FormatName f) const {
  return std::find(formats.begin(), formats.end(), f) != formats.end();
}

double SpectrumGrid::frequency_thz(int index) const {
  double ghz = base_frequency_thz * 1000.0 + index * channel_spacing_ghz;
  return std::round(ghz * 1000.0) / 1.0e6;  // 1 MHz resolution
}

bool Topology::has_node(const std::string& id) const {
  return node_index_.count(id) != 0;
}

const Node& Topology::node(const std::string& id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) {
    fail(ErrorCode::UnknownNode, "unknown node '" + id + "'");
  }
  return nodes[static_cast<std::size_t>(it->second)];
}

const FiberSpan& Topology::span(const std::string& id) const {
  auto it = span_index_.find(id);
  if (it == span_index_.end()) {
    fail(ErrorCode::InvalidTopology, "unknown span '" + id + "'");
  }
  return spans[static_cast<std::size_t>(it->second)];
}

int Topology::path_position(const std::string& id) const {
  auto it = path_pos_.find(id);
  if (it == path_pos_.end()) {
    fail(ErrorCode::UnknownNode, "unknown node '" + id + "'");
  }
  return it->second;
}

int Topology::segment_of_span(const std::string& span_id) const {
  auto it = span_segment_.find(span_id);
  if (it == span_segment_.end()) {
    fail(ErrorCode::InvalidTopology, "unknown span '" + span_id + "'");
  }
  return it->second;
}

namespace {

NodeKind parse_node_kind(const std::string& s) {
  if (s == "AMEN") return NodeKind::Amen;
  if (s == "MCEN") return NodeKind::Mcen;
  fail(ErrorCode::ParseError, "unknown node kind '" + s + "'");
}

AmpVariant parse_amp_variant(const std::string& s) {
  if (s == "EDFA") return AmpVariant::Edfa;
  if (s == "SOA_LOSSLESS") return AmpVariant::SoaLossless;
  fail(ErrorCode::ParseError, "unknown amp variant '" + s + "'");
}

DcTier parse_dc_tier(const std::string& s) {
  if (s == "EDC") return DcTier::Edc;
  if (s == "RDC") return DcTier::Rdc;
  if (s == "CDC") return DcTier::Cdc;
  fail(ErrorCode::ParseError, "unknown DC tier '" + s + "'");
}

Vendor parse_vendor(const std::string& s) {
  if (s == "A") return Vendor::A;
  if (s == "B") return Vendor::B;
  fail(ErrorCode::ParseError, "unknown transponder vendor '" + s + "'");
}

DataCenter parse_dc(const json& j, const std::string& context) {
  check_fields(j, context, {"tier", "cpu_cores", "ram_gb", "storage_tb"});
  DataCenter dc;
  dc.tier = parse_dc_tier(get_string(j, context, "tier"));
  dc.cpu_cores = static_cast<int>(get_integer(j, context, "cpu_cores"));
  dc.ram_gb = static_cast<int>(get_integer(j, context, "ram_gb"));
  dc.storage_tb = get_number(j, context, "storage_tb");
  if (dc.cpu_cores < 0 || dc.ram_gb < 0 || dc.storage_tb < 0.0) {
    fail(ErrorCode::InvalidTopology, context + ": negative DC capacity");
  }
  return dc;
}

Node parse_node(const json& j) {
  const std::string base = "nodes[]";
  check_fields(j, base,
               {"id", "kind", "amp_variant", "has_blocker", "dc",
                "transponders"});
  Node n;
  n.id = get_string(j, base, "id");
  if (n.id.empty()) {
    fail(ErrorCode::InvalidTopology, "node with empty id");
  }
  const std::string context = "node '" + n.id + "'";
  n.kind = parse_node_kind(get_string(j, context, "kind"));
  if (auto v = opt_string(j, context, "amp_variant")) {
    n.amp_variant = parse_amp_variant(*v);
  }
  n.has_blocker = opt_bool(j, context, "has_blocker").value_or(true);
  if (j.contains("dc") && !j.at("dc").is_null()) {
    n.dc = parse_dc(j.at("dc"), context + " dc");
  }
  if (j.contains("transponders")) {
    const json& ts = j.at("transponders");
    if (!ts.is_array()) {
      fail(ErrorCode::ParseError, context + ": 'transponders' must be a list");
    }
    for (const json& t : ts) {
      if (!t.is_string()) {
        fail(ErrorCode::ParseError,
             context + ": transponder entries are vendor strings");
      }
      n.transponders.push_back(
          TransponderType::for_vendor(parse_vendor(t.get<std::string>())));
    }
  }
  return n;
}

FiberSpan parse_span(const json& j) {
  const std::string base = "spans[]";
  check_fields(j, base,
               {"id", "a", "z", "length_km", "loss_coeff_db_per_km",
                "operational"});
  FiberSpan s;
  s.id = get_string(j, base, "id");
  if (s.id.empty()) {
    fail(ErrorCode::InvalidTopology, "span with empty id");
  }
  const std::string context = "span '" + s.id + "'";
  s.a = get_string(j, context, "a");
  s.z = get_string(j, context, "z");
  s.length_km = get_number(j, context, "length_km");
  s.loss_coeff_db_per_km =
      opt_number(j, context, "loss_coeff_db_per_km").value_or(0.2);
  s.operational = opt_bool(j, context, "operational").value_or(true);
  if (s.length_km <= 0.0) {
    fail(ErrorCode::InvalidTopology, context + ": length_km must be > 0");
  }
  if (s.loss_coeff_db_per_km <= 0.0) {
    fail(ErrorCode::InvalidTopology,
         context + ": loss_coeff_db_per_km must be > 0");
  }
  return s;
}

SpectrumGrid parse_grid(const json& j) {
  const std::string context = "grid";
  check_fields(j, context,
               {"channel_count", "channel_spacing_ghz", "base_frequency_thz"});
  SpectrumGrid g;
  if (auto v = opt_integer(j, context, "channel_count")) {
    g.channel_count = static_cast<int>(*v);
  }
  if (auto v = opt_number(j, context, "channel_spacing_ghz")) {
    g.channel_spacing_ghz = *v;
  }
  if (auto v = opt_number(j, context, "base_frequency_thz")) {
    g.base_frequency_thz = *v;
  }
  if (g.channel_count < 1) {
    fail(ErrorCode::InvalidTopology, "grid.channel_count must be >= 1");
  }
  if (g.channel_spacing_ghz <= 0.0) {
    fail(ErrorCode::InvalidTopology, "grid.channel_spacing_ghz must be > 0");
  }
  return g;
}

// Derives segments from an ordered span walk: a new segment starts after
// every blocker-equipped interior node.
std::vector<Segment> derive_segments(const Topology& topo) {
  std::vector<Segment> segments;
  if (topo.ordered_span_ids.empty()) {
    return segments;
  }
  Segment current;
  current.index = 0;
  for (std::size_t i = 0; i < topo.ordered_span_ids.size(); ++i) {
    current.span_ids.push_back(topo.ordered_span_ids[i]);
    bool last = i + 1 == topo.ordered_span_ids.size();
    if (!last) {
      // Interior node between span i and span i+1 along the path.
      const Node& interior = topo.node(topo.path_order[i + 1]);
      if (interior.has_blocker) {
        segments.push_back(std::move(current));
        current = Segment{};
        current.index = static_cast<int>(segments.size());
      }
    }
  }
  segments.push_back(std::move(current));
  return segments;
}

}  // namespace

struct TopologyBuilder {
  static void index(Topology& t) {
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
      t.node_index_[t.nodes[i].id] = static_cast<int>(i);
    }
    for (std::size_t i = 0; i < t.spans.size(); ++i) {
      t.span_index_[t.spans[i].id] = static_cast<int>(i);
    }
  }

  static void set_order(Topology& t, std::vector<std::string> order,
                        std::vector<std::string> span_order) {
    t.path_order = std::move(order);
    t.ordered_span_ids = std::move(span_order);
    for (std::size_t i = 0; i < t.path_order.size(); ++i) {
      t.path_pos_[t.path_order[i]] = static_cast<int>(i);
    }
  }

  static void set_segments(Topology& t, std::vector<Segment> segments) {
    t.segments = std::move(segments);
    for (const Segment& seg : t.segments) {
      for (const std::string& span_id : seg.span_ids) {
        t.span_segment_[span_id] = seg.index;
      }
    }
  }
};

LoadResult load_topology(const json& doc) {
  check_fields(doc, "topology", {"nodes", "spans", "grid"});

  LoadResult result;
  Topology& topo = result.topology;

  const json& nodes = require_field(doc, "topology", "nodes");
  if (!nodes.is_array()) {
    fail(ErrorCode::ParseError, "topology: 'nodes' must be a list");
  }
  for (const json& nj : nodes) {
    topo.nodes.push_back(parse_node(nj));
  }
  if (doc.contains("spans")) {
    const json& spans = doc.at("spans");
    if (!spans.is_array()) {
      fail(ErrorCode::ParseError, "topology: 'spans' must be a list");
    }
    for (const json& sj : spans) {
      topo.spans.push_back(parse_span(sj));
    }
  }
  if (doc.contains("grid")) {
    topo.grid = parse_grid(doc.at("grid"));
  }

  if (topo.nodes.empty()) {
    fail(ErrorCode::InvalidTopology, "topology has no nodes");
  }

  // Uniqueness.
  std::set<std::string> node_ids;
  for (const Node& n : topo.nodes) {
    if (!node_ids.insert(n.id).second) {
      fail(ErrorCode::InvalidTopology, "duplicate node id '" + n.id + "'");
    }
  }
  std::set<std::string> span_ids;
  for (const FiberSpan& s : topo.spans) {
    if (!span_ids.insert(s.id).second) {
      fail(ErrorCode::InvalidTopology, "duplicate span id '" + s.id + "'");
    }
    if (!node_ids.count(s.a) || !node_ids.count(s.z)) {
      fail(ErrorCode::InvalidTopology,
           "span '" + s.id + "' references a missing node");
    }
    if (s.a == s.z) {
      fail(ErrorCode::InvalidTopology, "span '" + s.id + "' is a self-loop");
    }
  }

  TopologyBuilder::index(topo);

  // Per-node invariants.
  int mcen_count = 0;
  for (const Node& n : topo.nodes) {
    if (n.kind == NodeKind::Mcen) {
      ++mcen_count;
    }
    if (n.dc) {
      if (n.transponders.empty()) {
        fail(ErrorCode::InvalidTopology,
             "node '" + n.id + "' has a DC but no transponder");
      }
      bool edge = n.dc->tier == DcTier::Edc;
      if (edge && n.kind != NodeKind::Amen) {
        fail(ErrorCode::InvalidTopology,
             "EDC must attach to an AMEN (node '" + n.id + "')");
      }
      if (!edge && n.kind != NodeKind::Mcen) {
        fail(ErrorCode::InvalidTopology,
             dc_tier_name(n.dc->tier) + std::string(" must attach to an MCEN (node '") +
                 n.id + "')");
      }
    }
  }
  if (mcen_count != 2) {
    fail(ErrorCode::InvalidTopology,
         "expected exactly 2 MCEN nodes, found " + std::to_string(mcen_count));
  }

  // Path shape: degrees <= 2, exactly two degree-1 endpoints, connected.
  std::map<std::string, std::vector<const FiberSpan*>> adjacency;
  for (const FiberSpan& s : topo.spans) {
    adjacency[s.a].push_back(&s);
    adjacency[s.z].push_back(&s);
  }
  std::vector<std::string> endpoints;
  for (const Node& n : topo.nodes) {
    std::size_t degree = adjacency.count(n.id) ? adjacency[n.id].size() : 0;
    if (degree > 2) {
      fail(ErrorCode::InvalidTopology,
           "node '" + n.id + "' has degree " + std::to_string(degree) +
               ", not a horseshoe");
    }
    if (degree == 1) {
      endpoints.push_back(n.id);
    }
    if (degree == 0 && topo.nodes.size() > 1) {
      fail(ErrorCode::InvalidTopology, "node '" + n.id + "' is isolated");
    }
  }
  if (topo.spans.size() + 1 != topo.nodes.size() || endpoints.size() != 2) {
    fail(ErrorCode::InvalidTopology,
         "span graph is not a simple path over all nodes");
  }
  for (const std::string& e : endpoints) {
    if (topo.node(e).kind != NodeKind::Mcen) {
      fail(ErrorCode::InvalidTopology,
           "horseshoe endpoint '" + e + "' is not an MCEN");
    }
  }

  // Walk the path from the lexicographically smaller MCEN endpoint.
  std::sort(endpoints.begin(), endpoints.end());
  std::vector<std::string> order{endpoints.front()};
  std::vector<std::string> span_order;
  std::string prev_span;
  while (order.size() < topo.nodes.size()) {
    const std::string& here = order.back();
    const FiberSpan* next = nullptr;
    for (const FiberSpan* s : adjacency[here]) {
      if (s->id != prev_span) {
        next = s;
        break;
      }
    }
    if (next == nullptr) {
      fail(ErrorCode::InvalidTopology,
           "span graph is not a simple path over all nodes");
    }
    order.push_back(next->a == here ? next->z : next->a);
    span_order.push_back(next->id);
    prev_span = next->id;
  }
  TopologyBuilder::set_order(topo, std::move(order), std::move(span_order));
  TopologyBuilder::set_segments(topo, derive_segments(topo));

  // Soft checks.
  for (const FiberSpan& s : topo.spans) {
    if (s.length_km < 20.0 || s.length_km > 200.0) {
      result.warnings.push_back("span '" + s.id + "' length " +
                                std::to_string(s.length_km) +
                                " km outside the typical 20-200 km range");
    }
  }
  return result;
}

std::vector<Segment> broadcast_segments(const Topology& topo) {
  return derive_segments(topo);
}

}  // namespace metrosim
