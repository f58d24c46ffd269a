#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "metrosim/topology.hpp"

namespace metrosim {

struct ModulationFormat {
  FormatName name = FormatName::DpQpsk;
  double baud_gbaud = 30.0;
  double net_rate_gbps = 100.0;
  double required_osnr_db = 14.0;  // at 0.1 nm reference bandwidth
};

// Impairment constants and the format table. All figures are data, not
// logic; a JSON config block overrides any of them.
struct OpticalConfig {
  double splitter_insertion_db = 3.5;  // splitter + coupler per traversed node
  double wb_insertion_db = 7.0;        // wavelength blocker, when present
  double edfa_nf_db = 5.5;
  double soa_nf_db = 7.0;
  std::array<ModulationFormat, 3> formats{
      ModulationFormat{FormatName::DpQpsk, 30.0, 100.0, 14.0},
      ModulationFormat{FormatName::Dp16Qam, 30.0, 200.0, 21.0},
      ModulationFormat{FormatName::Dp64Qam, 30.0, 300.0, 27.0},
  };

  const ModulationFormat& format(FormatName name) const;

  static OpticalConfig from_json(const json& j);
  json to_json() const;
};

struct OpticalPath {
  std::vector<std::string> hops;      // node ids, in order
  std::vector<std::string> span_ids;  // joining spans, hops.size() - 1
  double total_length_km = 0.0;
};

struct FeasibilityReport {
  double total_loss_db = 0.0;
  double osnr_db = 0.0;  // +inf for a zero-span path
  double required_osnr_db = 0.0;
  bool feasible = false;
};

enum class ChannelState { Active, Released };
enum class BlockerAction { Pass, Block };

struct BlockerRule {
  std::string node;
  int channel_index = 0;
  BlockerAction action = BlockerAction::Pass;
};

struct MediaChannel {
  std::string id;
  OpticalPath path;
  int channel_index = 0;
  FormatName format = FormatName::DpQpsk;
  double launch_power_dbm = 0.0;
  ChannelState state = ChannelState::Active;
  FeasibilityReport report;
  std::vector<BlockerRule> blocker_rules;
};

struct SpectrumState {
  // segment index -> occupied channel indices
  std::map<int, std::set<int>> occupied;

  bool operator==(const SpectrumState&) const = default;
};

// The unique simple path along the horseshoe; only operational spans.
OpticalPath route_path(const Topology& topo, const std::string& src,
                       const std::string& dst);

// Amplifier-chain OSNR budget. One amplified stage per traversed span,
// closed at the span's downstream node: stage loss is the fiber loss plus
// that node's insertion loss, stage OSNR(dB) = 58 + (launch - loss) - NF,
// stages combine as a reciprocal sum in linear units. SOA_LOSSLESS nodes
// contribute zero insertion loss but their own noise figure.
FeasibilityReport evaluate_feasibility(const Topology& topo,
                                       const OpticalPath& path,
                                       const ModulationFormat& format,
                                       double launch_power_dbm,
                                       const OpticalConfig& config);

// Segments whose span set intersects the path.
std::set<int> segments_touched(const Topology& topo, const OpticalPath& path);

// Lowest channel index free on every touched segment (first-fit). Does not
// mutate state. OPTICAL_BLOCKED when the grid is exhausted.
int assign_channel(const SpectrumState& state, const std::set<int>& touched,
                   int channel_count);

// PASS at blocker-equipped interior nodes of the path, BLOCK at the first
// blocker-equipped node beyond each endpoint, confining the broadcast.
std::vector<BlockerRule> configure_blockers(const Topology& topo,
                                            const OpticalPath& path,
                                            int channel_index);

bool node_supports_format(const Node& node, FormatName format);

// Mutable optical-layer store: spectrum occupancy plus the channel ledger.
// All mutations go through one owner; snapshots are plain copies.
class OpticalNetwork {
 public:
  OpticalNetwork() = default;
  explicit OpticalNetwork(OpticalConfig config) : config_(std::move(config)) {}

  // Routes, checks format support and feasibility, assigns a channel,
  // marks occupancy and records blocker rules. State is untouched on error.
  const MediaChannel& provision(const Topology& topo, const std::string& src,
                                const std::string& dst, FormatName format,
                                double launch_power_dbm);

  // Clears occupancy and blocker rules; the record remains as RELEASED.
  MediaChannel release(const Topology& topo, const std::string& id);

  const MediaChannel& channel(const std::string& id) const;  // UNKNOWN_CHANNEL
  const std::map<std::string, MediaChannel>& channels() const {
    return channels_;
  }
  const SpectrumState& spectrum() const { return spectrum_; }
  const OpticalConfig& config() const { return config_; }

  // Occupied slot count over all segments (for utilization metrics).
  std::size_t occupied_slot_count() const;

  json to_json() const;
  static OpticalNetwork from_json(const json& j);

 private:
  OpticalConfig config_;
  SpectrumState spectrum_;
  std::map<std::string, MediaChannel> channels_;
  std::uint64_t next_seq_ = 1;
};

}  // namespace metrosim
