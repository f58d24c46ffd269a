#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "metrosim/optical.hpp"

namespace metrosim {

enum class SipKind { TransponderPort, DcPort };

struct Sip {
  std::string id;
  std::string node;
  SipKind kind = SipKind::TransponderPort;
};

// What the optical domain exposes northbound: service interface points
// only, no nodes or spans.
struct AbstractedDomain {
  std::vector<Sip> sips;

  const Sip& sip(const std::string& id) const;  // UNKNOWN_SIP
  bool has_sip(const std::string& id) const;
};

// One SIP per transponder slot (a dual-wavelength device contributes two)
// plus one per DC port.
AbstractedDomain abstract_domain(const Topology& topo);

enum class ServiceLayer { Optical, L2, L3 };
enum class ServiceState { Planned, Provisioning, Active, Deleting, Deleted, Failed };

const char* service_layer_name(ServiceLayer l);
const char* service_state_name(ServiceState s);

struct ConnectivityService {
  std::string id;
  ServiceLayer layer = ServiceLayer::Optical;
  std::string sip_a;
  std::string sip_z;
  ServiceState state = ServiceState::Planned;
  std::optional<std::string> underlying;  // MediaChannel id
  std::optional<int> vlan_id;             // L2, scoped per channel
  std::optional<std::uint32_t> vni;       // L3, global pool
  double bandwidth_gbps = 0.0;
  std::optional<FormatName> format;       // format of the underlying channel
  std::vector<ServiceState> history;      // every state ever entered
};

struct CreateRequest {
  std::string sip_a;
  std::string sip_z;
  ServiceLayer layer = ServiceLayer::Optical;
  double bandwidth_gbps = 0.0;
  std::optional<FormatName> format_hint;
  double launch_power_dbm = 0.0;
};

enum class DeviceKind { Transponder, Blocker };
enum class Dialect { OpenconfigLike, OpenroadmLike };

struct DeviceConfig {
  std::string device;  // node id
  DeviceKind kind = DeviceKind::Transponder;
  Dialect dialect = Dialect::OpenconfigLike;
  json payload;
};

struct ComConfig {
  int vlan_min = 2;
  int vlan_max = 4094;
  std::uint32_t vni_min = 1;
  std::uint32_t vni_max = (1u << 24) - 1;
};

// Parent controller state: the abstracted domain, the service ledger and
// the identifier pools. Mutations are serialized through one owner.
class Com {
 public:
  Com() = default;
  explicit Com(const Topology& topo, ComConfig config = {});

  const AbstractedDomain& domain() const { return domain_; }
  const ComConfig& config() const { return config_; }

  // Creates a connectivity service. L2/L3 ride an existing channel between
  // the same SIP pair when one has spare bandwidth, otherwise a new channel
  // is provisioned. All pool and spectrum checks happen before any
  // mutation; a failed create leaves pools and spectrum untouched and
  // records the service as FAILED.
  const ConnectivityService& create(const Topology& topo,
                                    OpticalNetwork& optical,
                                    const CreateRequest& request);

  // Frees identifiers and releases the underlying channel when this was its
  // last rider.
  ConnectivityService remove(const Topology& topo, OpticalNetwork& optical,
                             const std::string& id);

  // Two transponder documents plus one per blocker rule, ordered by
  // (node, channel, kind). Pure: identical calls yield identical documents.
  std::vector<DeviceConfig> render_device_configs(const Topology& topo,
                                                  const OpticalNetwork& optical,
                                                  const std::string& id) const;

  // Read-only snapshot copy.
  ConnectivityService get(const std::string& id) const;

  const std::map<std::string, ConnectivityService>& services() const {
    return services_;
  }

  json to_json() const;
  static Com from_json(const Topology& topo, const json& j);

 private:
  // Rider bookkeeping for channels created on behalf of L2/L3 services.
  struct ChannelBinding {
    std::string channel_id;
    std::string sip_a;  // normalized: sip_a < sip_z
    std::string sip_z;
    std::set<std::string> riders;
    std::set<int> vlans_used;
    double bandwidth_used = 0.0;
  };

  ConnectivityService& transition(ConnectivityService& svc, ServiceState next);
  std::string next_service_id();
  FormatName select_format(const Topology& topo, const OpticalNetwork& optical,
                           const std::string& node_a, const std::string& node_z,
                           const std::optional<FormatName>& hint,
                           double needed_gbps, double launch_power_dbm) const;

  AbstractedDomain domain_;
  ComConfig config_;
  std::map<std::string, ConnectivityService> services_;
  std::map<std::string, ChannelBinding> bindings_;  // by channel id
  std::set<std::uint32_t> vnis_used_;
  std::uint64_t next_seq_ = 1;
};

json service_to_json(const ConnectivityService& s);
json device_config_to_json(const DeviceConfig& c);

}  // namespace metrosim
