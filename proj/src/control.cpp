#include "metrosim/control.hpp"

#include <algorithm>
#include <cassert>
#include <iomanip>
#include <sstream>

namespace metrosim {

const char* service_layer_name(ServiceLayer l) {
  switch (l) {
    case ServiceLayer::Optical: return "OPTICAL";
    case ServiceLayer::L2: return "L2";
    case ServiceLayer::L3: return "L3";
  }
  return "?";
}

const char* service_state_name(ServiceState s) {
  switch (s) {
    case ServiceState::Planned: return "PLANNED";
    case ServiceState::Provisioning: return "PROVISIONING";
    case ServiceState::Active: return "ACTIVE";
    case ServiceState::Deleting: return "DELETING";
    case ServiceState::Deleted: return "DELETED";
    case ServiceState::Failed: return "FAILED";
  }
  return "?";
}

namespace {

ServiceState parse_service_state(const std::string& s) {
  for (ServiceState st :
       {ServiceState::Planned, ServiceState::Provisioning, ServiceState::Active,
        ServiceState::Deleting, ServiceState::Deleted, ServiceState::Failed}) {
    if (s == service_state_name(st)) {
      return st;
    }
  }
  fail(ErrorCode::ParseError, "unknown service state '" + s + "'");
}

ServiceLayer parse_service_layer(const std::string& s) {
  if (s == "OPTICAL") return ServiceLayer::Optical;
  if (s == "L2") return ServiceLayer::L2;
  if (s == "L3") return ServiceLayer::L3;
  fail(ErrorCode::ParseError, "unknown service layer '" + s + "'");
}

bool legal_transition(ServiceState from, ServiceState to) {
  switch (from) {
    case ServiceState::Planned:
      return to == ServiceState::Provisioning;
    case ServiceState::Provisioning:
      return to == ServiceState::Active || to == ServiceState::Failed;
    case ServiceState::Active:
      return to == ServiceState::Deleting;
    case ServiceState::Deleting:
      return to == ServiceState::Deleted;
    default:
      return false;
  }
}

}  // namespace

const Sip& AbstractedDomain::sip(const std::string& id) const {
  for (const Sip& s : sips) {
    if (s.id == id) {
      return s;
    }
  }
  fail(ErrorCode::UnknownSip, "unknown SIP '" + id + "'");
}

bool AbstractedDomain::has_sip(const std::string& id) const {
  return std::any_of(sips.begin(), sips.end(),
                     [&](const Sip& s) { return s.id == id; });
}

AbstractedDomain abstract_domain(const Topology& topo) {
  AbstractedDomain domain;
  for (const std::string& node_id : topo.path_order) {
    const Node& n = topo.node(node_id);
    int slot = 0;
    for (const TransponderType& t : n.transponders) {
      for (int w = 0; w < t.wavelengths; ++w) {
        domain.sips.push_back(
            {n.id + "-t" + std::to_string(slot++), n.id, SipKind::TransponderPort});
      }
    }
    if (n.dc) {
      domain.sips.push_back({n.id + "-dc", n.id, SipKind::DcPort});
    }
  }
  return domain;
}

Com::Com(const Topology& topo, ComConfig config)
    : domain_(abstract_domain(topo)), config_(config) {}

ConnectivityService& Com::transition(ConnectivityService& svc,
                                     ServiceState next) {
  if (!legal_transition(svc.state, next)) {
    throw std::logic_error(std::string("illegal service transition ") +
                           service_state_name(svc.state) + " -> " +
                           service_state_name(next));
  }
  svc.state = next;
  svc.history.push_back(next);
  return svc;
}

std::string Com::next_service_id() {
  std::ostringstream id;
  id << "svc-" << std::setw(6) << std::setfill('0') << next_seq_++;
  return id.str();
}

const ConnectivityService& Com::create(const Topology& topo,
                                       OpticalNetwork& optical,
                                       const CreateRequest& request) {
  const Sip& sip_a = domain_.sip(request.sip_a);
  const Sip& sip_z = domain_.sip(request.sip_z);
  if (sip_a.id == sip_z.id) {
    fail(ErrorCode::SameEndpoint, "service endpoints are the same SIP");
  }
  if (request.layer != ServiceLayer::Optical && request.bandwidth_gbps <= 0.0) {
    fail(ErrorCode::InvalidParams,
         "L2/L3 services need bandwidth_gbps > 0");
  }
  if (request.bandwidth_gbps < 0.0) {
    fail(ErrorCode::InvalidParams, "bandwidth_gbps must be >= 0");
  }

  ConnectivityService svc;
  svc.id = next_service_id();
  svc.layer = request.layer;
  svc.sip_a = sip_a.id;
  svc.sip_z = sip_z.id;
  svc.bandwidth_gbps = request.bandwidth_gbps;
  svc.state = ServiceState::Planned;
  svc.history.push_back(ServiceState::Planned);
  auto [slot, inserted] = services_.emplace(svc.id, std::move(svc));
  ConnectivityService& record = slot->second;
  transition(record, ServiceState::Provisioning);

  try {
    if (request.layer == ServiceLayer::Optical) {
      FormatName fmt = select_format(topo, optical, sip_a.node, sip_z.node,
                                     request.format_hint,
                                     request.bandwidth_gbps,
                                     request.launch_power_dbm);
      const MediaChannel& ch = optical.provision(
          topo, sip_a.node, sip_z.node, fmt, request.launch_power_dbm);
      record.underlying = ch.id;
      record.format = fmt;
      transition(record, ServiceState::Active);
      return record;
    }

    // L2/L3: prefer the existing channel between this SIP pair with the
    // most spare bandwidth.
    std::string key_a = std::min(sip_a.id, sip_z.id);
    std::string key_z = std::max(sip_a.id, sip_z.id);
    ChannelBinding* binding = nullptr;
    double best_free = -1.0;
    for (auto& [cid, b] : bindings_) {
      if (b.sip_a != key_a || b.sip_z != key_z) {
        continue;
      }
      double rate =
          optical.config().format(optical.channel(cid).format).net_rate_gbps;
      double free = rate - b.bandwidth_used;
      if (free >= request.bandwidth_gbps && free > best_free) {
        best_free = free;
        binding = &b;
      }
    }

    // Identifier pools are scanned before any mutation so a failure here
    // rolls back nothing.
    std::optional<std::uint32_t> vni;
    if (request.layer == ServiceLayer::L3) {
      std::uint32_t candidate = config_.vni_min;
      while (candidate <= config_.vni_max && vnis_used_.count(candidate)) {
        ++candidate;
      }
      if (candidate > config_.vni_max) {
        fail(ErrorCode::VniPoolExhausted, "VNI pool exhausted");
      }
      vni = candidate;
    }

    if (binding == nullptr) {
      FormatName fmt = select_format(topo, optical, sip_a.node, sip_z.node,
                                     request.format_hint,
                                     request.bandwidth_gbps,
                                     request.launch_power_dbm);
      const MediaChannel& ch = optical.provision(
          topo, sip_a.node, sip_z.node, fmt, request.launch_power_dbm);
      ChannelBinding b;
      b.channel_id = ch.id;
      b.sip_a = key_a;
      b.sip_z = key_z;
      binding = &bindings_.emplace(ch.id, std::move(b)).first->second;
    }

    if (request.layer == ServiceLayer::L2) {
      int vlan = config_.vlan_min;
      while (vlan <= config_.vlan_max && binding->vlans_used.count(vlan)) {
        ++vlan;
      }
      if (vlan > config_.vlan_max) {
        fail(ErrorCode::L2PoolExhausted,
             "VLAN pool exhausted on channel " + binding->channel_id);
      }
      binding->vlans_used.insert(vlan);
      record.vlan_id = vlan;
    } else {
      vnis_used_.insert(*vni);
      record.vni = vni;
    }
    binding->riders.insert(record.id);
    binding->bandwidth_used += request.bandwidth_gbps;
    record.underlying = binding->channel_id;
    record.format = optical.channel(binding->channel_id).format;
    transition(record, ServiceState::Active);

    // Bandwidth conservation must hold after every mutation.
    assert(binding->bandwidth_used <=
           optical.config().format(*record.format).net_rate_gbps + 1e-9);
    return record;
  } catch (const DomainError&) {
    transition(record, ServiceState::Failed);
    throw;
  }
}

FormatName Com::select_format(const Topology& topo,
                              const OpticalNetwork& optical,
                              const std::string& node_a,
                              const std::string& node_z,
                              const std::optional<FormatName>& hint,
                              double needed_gbps,
                              double launch_power_dbm) const {
  const OpticalConfig& cfg = optical.config();
  if (hint) {
    const ModulationFormat& f = cfg.format(*hint);
    if (needed_gbps > f.net_rate_gbps) {
      fail(ErrorCode::CapacityExceeded,
           std::to_string(needed_gbps) + " Gb/s exceeds the " +
               std::to_string(f.net_rate_gbps) + " Gb/s rate of " +
               format_name_str(*hint));
    }
    return *hint;
  }
  // Auto-select the highest-rate format both endpoints support that is
  // feasible on the path, falling back 64QAM -> 16QAM -> QPSK.
  OpticalPath path = route_path(topo, node_a, node_z);
  bool any_supported = false;
  bool any_feasible = false;
  for (auto it = cfg.formats.rbegin(); it != cfg.formats.rend(); ++it) {
    if (!node_supports_format(topo.node(node_a), it->name) ||
        !node_supports_format(topo.node(node_z), it->name)) {
      continue;
    }
    any_supported = true;
    FeasibilityReport r =
        evaluate_feasibility(topo, path, *it, launch_power_dbm, cfg);
    if (!r.feasible) {
      continue;
    }
    any_feasible = true;
    if (it->net_rate_gbps >= needed_gbps) {
      return it->name;
    }
  }
  if (!any_supported) {
    fail(ErrorCode::UnsupportedFormat,
         "endpoints '" + node_a + "'/'" + node_z +
             "' share no usable modulation format");
  }
  if (any_feasible) {
    fail(ErrorCode::CapacityExceeded,
         std::to_string(needed_gbps) +
             " Gb/s exceeds every feasible single-channel rate");
  }
  fail(ErrorCode::InfeasibleOsnr,
       "no supported format closes the OSNR budget between '" + node_a +
           "' and '" + node_z + "'");
}

ConnectivityService Com::remove(const Topology& topo, OpticalNetwork& optical,
                                const std::string& id) {
  auto it = services_.find(id);
  if (it == services_.end()) {
    fail(ErrorCode::UnknownService, "unknown service '" + id + "'");
  }
  ConnectivityService& svc = it->second;
  if (svc.state != ServiceState::Active) {
    fail(ErrorCode::InvalidState,
         "service '" + id + "' is " + service_state_name(svc.state) +
             ", not ACTIVE");
  }
  transition(svc, ServiceState::Deleting);

  if (svc.layer == ServiceLayer::Optical) {
    optical.release(topo, *svc.underlying);
  } else {
    auto bit = bindings_.find(*svc.underlying);
    ChannelBinding& binding = bit->second;
    binding.riders.erase(svc.id);
    binding.bandwidth_used -= svc.bandwidth_gbps;
    if (svc.vlan_id) {
      binding.vlans_used.erase(*svc.vlan_id);
    }
    if (svc.vni) {
      vnis_used_.erase(*svc.vni);
    }
    if (binding.riders.empty()) {
      optical.release(topo, binding.channel_id);
      bindings_.erase(bit);
    }
  }
  transition(svc, ServiceState::Deleted);
  return svc;
}

std::vector<DeviceConfig> Com::render_device_configs(
    const Topology& topo, const OpticalNetwork& optical,
    const std::string& id) const {
  auto it = services_.find(id);
  if (it == services_.end()) {
    fail(ErrorCode::UnknownService, "unknown service '" + id + "'");
  }
  const ConnectivityService& svc = it->second;
  if (svc.state != ServiceState::Active) {
    fail(ErrorCode::InvalidState,
         "service '" + id + "' is " + service_state_name(svc.state) +
             ", not ACTIVE");
  }
  const MediaChannel& ch = optical.channel(*svc.underlying);
  double freq_thz = topo.grid.frequency_thz(ch.channel_index);

  std::vector<DeviceConfig> configs;
  for (const std::string& endpoint : {ch.path.hops.front(), ch.path.hops.back()}) {
    const Node& n = topo.node(endpoint);
    // The first transponder able to carry the format is the one configured.
    const TransponderType* device = nullptr;
    for (const TransponderType& t : n.transponders) {
      if (t.supports(ch.format)) {
        device = &t;
        break;
      }
    }
    DeviceConfig c;
    c.device = endpoint;
    c.kind = DeviceKind::Transponder;
    c.dialect = Dialect::OpenconfigLike;
    c.payload = json{{"frequency-thz", freq_thz},
                     {"operational-mode", format_name_str(ch.format)},
                     {"target-output-power-dbm", ch.launch_power_dbm},
                     {"vendor", device ? vendor_name(device->vendor) : "?"},
                     {"openconfig-native",
                      device ? device->openconfig_native : false}};
    configs.push_back(std::move(c));
  }
  for (const BlockerRule& rule : ch.blocker_rules) {
    DeviceConfig c;
    c.device = rule.node;
    c.kind = DeviceKind::Blocker;
    c.dialect = Dialect::OpenroadmLike;
    c.payload = json{{"channel-index", rule.channel_index},
                     {"frequency-thz", topo.grid.frequency_thz(rule.channel_index)},
                     {"action", rule.action == BlockerAction::Pass ? "pass"
                                                                   : "block"}};
    configs.push_back(std::move(c));
  }
  std::stable_sort(configs.begin(), configs.end(),
                   [](const DeviceConfig& x, const DeviceConfig& y) {
                     if (x.device != y.device) return x.device < y.device;
                     int cx = x.payload.contains("channel-index")
                                  ? x.payload["channel-index"].get<int>()
                                  : -1;
                     int cy = y.payload.contains("channel-index")
                                  ? y.payload["channel-index"].get<int>()
                                  : -1;
                     return cx < cy;
                   });
  return configs;
}

ConnectivityService Com::get(const std::string& id) const {
  auto it = services_.find(id);
  if (it == services_.end()) {
    fail(ErrorCode::UnknownService, "unknown service '" + id + "'");
  }
  return it->second;
}

json service_to_json(const ConnectivityService& s) {
  json history = json::array();
  for (ServiceState st : s.history) {
    history.push_back(service_state_name(st));
  }
  return json{
      {"id", s.id},
      {"layer", service_layer_name(s.layer)},
      {"sip_a", s.sip_a},
      {"sip_z", s.sip_z},
      {"state", service_state_name(s.state)},
      {"underlying", s.underlying ? json(*s.underlying) : json(nullptr)},
      {"vlan_id", s.vlan_id ? json(*s.vlan_id) : json(nullptr)},
      {"vni", s.vni ? json(*s.vni) : json(nullptr)},
      {"bandwidth_gbps", s.bandwidth_gbps},
      {"format", s.format ? json(format_name_str(*s.format)) : json(nullptr)},
      {"history", history}};
}

json device_config_to_json(const DeviceConfig& c) {
  return json{{"device", c.device},
              {"kind", c.kind == DeviceKind::Transponder ? "TRANSPONDER"
                                                         : "BLOCKER"},
              {"dialect", c.dialect == Dialect::OpenconfigLike
                              ? "OPENCONFIG_LIKE"
                              : "OPENROADM_LIKE"},
              {"payload", c.payload}};
}

json Com::to_json() const {
  json services = json::object();
  for (const auto& [id, s] : services_) {
    services[id] = service_to_json(s);
  }
  json bindings = json::object();
  for (const auto& [cid, b] : bindings_) {
    bindings[cid] = json{{"channel_id", b.channel_id},
                         {"sip_a", b.sip_a},
                         {"sip_z", b.sip_z},
                         {"riders", b.riders},
                         {"vlans_used", b.vlans_used},
                         {"bandwidth_used", b.bandwidth_used}};
  }
  return json{{"services", services},
              {"bindings", bindings},
              {"vnis_used", vnis_used_},
              {"next_seq", next_seq_},
              {"config",
               {{"vlan_min", config_.vlan_min},
                {"vlan_max", config_.vlan_max},
                {"vni_min", config_.vni_min},
                {"vni_max", config_.vni_max}}}};
}

Com Com::from_json(const Topology& topo, const json& j) {
  ComConfig cfg;
  const json& cj = j.at("config");
  cfg.vlan_min = cj.at("vlan_min").get<int>();
  cfg.vlan_max = cj.at("vlan_max").get<int>();
  cfg.vni_min = cj.at("vni_min").get<std::uint32_t>();
  cfg.vni_max = cj.at("vni_max").get<std::uint32_t>();
  Com com(topo, cfg);
  for (const auto& [id, sj] : j.at("services").items()) {
    ConnectivityService s;
    s.id = id;
    s.layer = parse_service_layer(sj.at("layer").get<std::string>());
    s.sip_a = sj.at("sip_a").get<std::string>();
    s.sip_z = sj.at("sip_z").get<std::string>();
    s.state = parse_service_state(sj.at("state").get<std::string>());
    if (!sj.at("underlying").is_null()) {
      s.underlying = sj.at("underlying").get<std::string>();
    }
    if (!sj.at("vlan_id").is_null()) {
      s.vlan_id = sj.at("vlan_id").get<int>();
    }
    if (!sj.at("vni").is_null()) {
      s.vni = sj.at("vni").get<std::uint32_t>();
    }
    s.bandwidth_gbps = sj.at("bandwidth_gbps").get<double>();
    if (!sj.at("format").is_null()) {
      s.format = parse_format_name(sj.at("format").get<std::string>());
    }
    for (const json& h : sj.at("history")) {
      s.history.push_back(parse_service_state(h.get<std::string>()));
    }
    com.services_.emplace(id, std::move(s));
  }
  for (const auto& [cid, bj] : j.at("bindings").items()) {
    ChannelBinding b;
    b.channel_id = bj.at("channel_id").get<std::string>();
    b.sip_a = bj.at("sip_a").get<std::string>();
    b.sip_z = bj.at("sip_z").get<std::string>();
    b.riders = bj.at("riders").get<std::set<std::string>>();
    b.vlans_used = bj.at("vlans_used").get<std::set<int>>();
    b.bandwidth_used = bj.at("bandwidth_used").get<double>();
    com.bindings_.emplace(cid, std::move(b));
  }
  com.vnis_used_ = j.at("vnis_used").get<std::set<std::uint32_t>>();
  com.next_seq_ = j.at("next_seq").get<std::uint64_t>();
  return com;
}

}  // namespace metrosim
