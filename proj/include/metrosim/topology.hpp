#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "metrosim/json_util.hpp"

namespace metrosim {

enum class NodeKind { Amen, Mcen };
enum class AmpVariant { Edfa, SoaLossless };
enum class DcTier { Edc, Rdc, Cdc };
enum class Vendor { A, B };
enum class FormatName { DpQpsk, Dp16Qam, Dp64Qam };

const char* node_kind_name(NodeKind k);
const char* amp_variant_name(AmpVariant v);
const char* dc_tier_name(DcTier t);
const char* vendor_name(Vendor v);
const char* format_name_str(FormatName f);
FormatName parse_format_name(const std::string& s);  // PARSE_ERROR on unknown

struct DataCenter {
  DcTier tier = DcTier::Edc;
  int cpu_cores = 0;
  int ram_gb = 0;
  double storage_tb = 0.0;
};

// Per-device capability profile. The vendor fixes wavelength count, the
// supported format set and whether the config interface is native.
struct TransponderType {
  Vendor vendor = Vendor::B;
  int wavelengths = 1;
  std::vector<FormatName> formats;
  bool openconfig_native = false;

  static TransponderType for_vendor(Vendor v);
  bool supports(FormatName f) const;
};

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Amen;
  AmpVariant amp_variant = AmpVariant::Edfa;
  bool has_blocker = true;
  std::optional<DataCenter> dc;
  std::vector<TransponderType> transponders;
};

struct FiberSpan {
  std::string id;
  std::string a;
  std::string z;
  double length_km = 0.0;
  double loss_coeff_db_per_km = 0.2;
  bool operational = true;

  double loss_db() const { return length_km * loss_coeff_db_per_km; }
};

struct SpectrumGrid {
  int channel_count = 80;
  double channel_spacing_ghz = 50.0;
  double base_frequency_thz = 191.6;

  // Centre frequency of channel i, rounded to 1 MHz so rendered documents
  // carry clean values.
  double frequency_thz(int index) const;
};

// A maximal run of contiguous spans not separated by a blocker-equipped
// interior node. Channels broadcast freely within one segment.
struct Segment {
  int index = 0;
  std::vector<std::string> span_ids;
};

// Validated horseshoe network. Immutable after load; safe to share.
struct Topology {
  std::vector<Node> nodes;
  std::vector<FiberSpan> spans;
  SpectrumGrid grid;

  // Derived at load time.
  std::vector<std::string> path_order;        // node ids, MCEN to MCEN
  std::vector<std::string> ordered_span_ids;  // spans along path_order
  std::vector<Segment> segments;

  bool has_node(const std::string& id) const;
  const Node& node(const std::string& id) const;  // UNKNOWN_NODE
  const FiberSpan& span(const std::string& id) const;
  // Position of a node along the horseshoe.
  int path_position(const std::string& id) const;
  // Segment index holding the given span.
  int segment_of_span(const std::string& span_id) const;

 private:
  std::map<std::string, int> node_index_;
  std::map<std::string, int> span_index_;
  std::map<std::string, int> span_segment_;
  std::map<std::string, int> path_pos_;
  friend struct TopologyBuilder;
};

struct LoadResult {
  Topology topology;
  std::vector<std::string> warnings;
};

// Parses and validates a topology document. PARSE_ERROR for malformed or
// unknown-field documents, INVALID_TOPOLOGY for structural violations.
LoadResult load_topology(const json& doc);

// Recomputes the filterless broadcast partition of the span set.
std::vector<Segment> broadcast_segments(const Topology& topo);

}  // namespace metrosim
