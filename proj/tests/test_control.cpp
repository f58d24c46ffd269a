#include <doctest.h>

#include <set>

#include "metrosim/rng.hpp"
#include "fixtures.hpp"

using namespace metrosim;
using namespace metrosim::testing;

namespace {

// All nodes one single-wavelength transponder; DCs on MCEN1, AMEN2, MCEN2.
json abstraction_fixture() {
  json doc = demo5_doc();
  for (json& n : doc["nodes"]) {
    n["transponders"] = json::array({"B"});
  }
  doc["nodes"][1].erase("dc");
  doc["nodes"][3].erase("dc");
  return doc;
}

}  // namespace

TEST_CASE("abstract_domain exposes one SIP per slot and per DC port") {
  Topology topo = load_topology(abstraction_fixture()).topology;
  AbstractedDomain domain = abstract_domain(topo);
  CHECK(domain.sips.size() == 8);  // 5 transponder slots + 3 DC ports

  SUBCASE("an added slot adds exactly one SIP") {
    json doc = abstraction_fixture();
    doc["nodes"][1]["transponders"].push_back("B");
    Topology more = load_topology(doc).topology;
    CHECK(abstract_domain(more).sips.size() == 9);
  }
  SUBCASE("a dual-wavelength device adds two SIPs") {
    json doc = abstraction_fixture();
    doc["nodes"][1]["transponders"] = json::array({"A"});
    Topology more = load_topology(doc).topology;
    CHECK(abstract_domain(more).sips.size() == 9);
  }
  SUBCASE("nothing to expose, no SIPs") {
    json doc = abstraction_fixture();
    for (json& n : doc["nodes"]) {
      n["transponders"] = json::array();
      n.erase("dc");
    }
    Topology bare = load_topology(doc).topology;
    CHECK(abstract_domain(bare).sips.empty());
  }
}

TEST_CASE("L2 services share a channel and take ascending VLAN ids") {
  Topology topo = demo5();
  OpticalNetwork optical;
  Com com(topo);

  CreateRequest req;
  req.sip_a = "AMEN1-dc";
  req.sip_z = "MCEN1-dc";
  req.layer = ServiceLayer::L2;
  req.bandwidth_gbps = 10.0;

  const ConnectivityService& first = com.create(topo, optical, req);
  CHECK(first.state == ServiceState::Active);
  CHECK(first.vlan_id == 2);
  CHECK(first.format == FormatName::Dp16Qam);  // vendor A caps at 16QAM
  std::string channel = *first.underlying;
  CHECK(optical.channel(channel).channel_index == 0);

  const ConnectivityService& second = com.create(topo, optical, req);
  CHECK(second.vlan_id == 3);
  CHECK(*second.underlying == channel);  // 190 of 200 Gb/s still free
  CHECK(optical.channels().size() == 1);

  SUBCASE("history walks PLANNED, PROVISIONING, ACTIVE") {
    CHECK(first.history ==
          std::vector<ServiceState>{ServiceState::Planned,
                                    ServiceState::Provisioning,
                                    ServiceState::Active});
  }
}

TEST_CASE("bandwidth past the channel rate forces a second channel") {
  Topology topo = demo5();
  OpticalNetwork optical;
  Com com(topo);
  CreateRequest req;
  req.sip_a = "AMEN1-dc";
  req.sip_z = "MCEN1-dc";
  req.layer = ServiceLayer::L3;
  req.bandwidth_gbps = 150.0;

  const ConnectivityService& a = com.create(topo, optical, req);
  const ConnectivityService& b = com.create(topo, optical, req);
  CHECK(*a.underlying != *b.underlying);  // 150 + 150 > 200
  CHECK(optical.channels().size() == 2);
  CHECK(a.vni == 1);
  CHECK(b.vni == 2);
}

TEST_CASE("a demand above every single-channel rate is CAPACITY_EXCEEDED") {
  Topology topo = demo5();
  OpticalNetwork optical;
  Com com(topo);
  CreateRequest req;
  req.sip_a = "AMEN1-dc";
  req.sip_z = "MCEN1-dc";
  req.layer = ServiceLayer::L2;
  req.bandwidth_gbps = 250.0;
  req.format_hint = FormatName::Dp16Qam;  // 200 Gb/s
  try {
    com.create(topo, optical, req);
    FAIL("expected CAPACITY_EXCEEDED");
  } catch (const DomainError& e) {
    CHECK(e.code() == ErrorCode::CapacityExceeded);
  }
  CHECK(optical.channels().empty());
  // The failed attempt is recorded as FAILED.
  int failed = 0;
  for (const auto& [id, svc] : com.services()) {
    if (svc.state == ServiceState::Failed) {
      ++failed;
    }
  }
  CHECK(failed == 1);
}

TEST_CASE("unknown SIPs are rejected before any state is touched") {
  Topology topo = demo5();
  OpticalNetwork optical;
  Com com(topo);
  CreateRequest req;
  req.sip_a = "NOPE-dc";
  req.sip_z = "MCEN1-dc";
  try {
    com.create(topo, optical, req);
    FAIL("expected UNKNOWN_SIP");
  } catch (const DomainError& e) {
    CHECK(e.code() == ErrorCode::UnknownSip);
  }
  CHECK(com.services().empty());
}

TEST_CASE("delete releases the channel only with the last rider") {
  Topology topo = demo5();
  OpticalNetwork optical;
  Com com(topo);
  CreateRequest req;
  req.sip_a = "AMEN2-dc";
  req.sip_z = "MCEN1-dc";
  req.layer = ServiceLayer::L2;
  req.bandwidth_gbps = 5.0;
  std::string a = com.create(topo, optical, req).id;
  std::string b = com.create(topo, optical, req).id;
  std::string channel = *com.get(a).underlying;

  com.remove(topo, optical, a);
  CHECK(optical.channel(channel).state == ChannelState::Active);

  ConnectivityService last = com.remove(topo, optical, b);
  CHECK(last.state == ServiceState::Deleted);
  CHECK(optical.channel(channel).state == ChannelState::Released);
  CHECK(optical.spectrum().occupied.empty());

  SUBCASE("deleting again is INVALID_STATE") {
    try {
      com.remove(topo, optical, b);
      FAIL("expected INVALID_STATE");
    } catch (const DomainError& e) {
      CHECK(e.code() == ErrorCode::InvalidState);
    }
  }
  SUBCASE("unknown service id") {
    try {
      com.remove(topo, optical, "svc-424242");
      FAIL("expected UNKNOWN_SERVICE");
    } catch (const DomainError& e) {
      CHECK(e.code() == ErrorCode::UnknownService);
    }
  }
}

TEST_CASE("an optical-layer service owns its channel outright") {
  Topology topo = demo5();
  OpticalNetwork optical;
  Com com(topo);
  CreateRequest opt;
  opt.sip_a = "AMEN1-t0";
  opt.sip_z = "MCEN1-t0";
  opt.layer = ServiceLayer::Optical;
  std::string id = com.create(topo, optical, opt).id;
  CHECK(com.get(id).vlan_id == std::nullopt);
  CHECK(com.get(id).vni == std::nullopt);

  // An L2 between the same SIPs provisions its own channel.
  CreateRequest l2 = opt;
  l2.layer = ServiceLayer::L2;
  l2.bandwidth_gbps = 1.0;
  std::string other = *com.create(topo, optical, l2).underlying;
  CHECK(other != *com.get(id).underlying);

  com.remove(topo, optical, id);
  CHECK(optical.channel(*com.get(id).underlying).state ==
        ChannelState::Released);
}

TEST_CASE("VLAN pool exhausts per channel, VNI pool globally") {
  Topology topo = demo5();
  OpticalNetwork optical;

  SUBCASE("VLAN") {
    ComConfig cfg;
    cfg.vlan_min = 2;
    cfg.vlan_max = 4;  // three tags
    Com com(topo, cfg);
    CreateRequest req;
    req.sip_a = "AMEN1-dc";
    req.sip_z = "MCEN1-dc";
    req.layer = ServiceLayer::L2;
    req.bandwidth_gbps = 0.001;
    CHECK(com.create(topo, optical, req).vlan_id == 2);
    CHECK(com.create(topo, optical, req).vlan_id == 3);
    CHECK(com.create(topo, optical, req).vlan_id == 4);
    SpectrumState spectrum_before = optical.spectrum();
    try {
      com.create(topo, optical, req);
      FAIL("expected L2_POOL_EXHAUSTED");
    } catch (const DomainError& e) {
      CHECK(e.code() == ErrorCode::L2PoolExhausted);
    }
    CHECK(optical.spectrum() == spectrum_before);
  }
  SUBCASE("VNI") {
    ComConfig cfg;
    cfg.vni_min = 1;
    cfg.vni_max = 2;
    Com com(topo, cfg);
    CreateRequest req;
    req.sip_a = "AMEN1-dc";
    req.sip_z = "MCEN1-dc";
    req.layer = ServiceLayer::L3;
    req.bandwidth_gbps = 0.001;
    CHECK(com.create(topo, optical, req).vni == 1);
    CHECK(com.create(topo, optical, req).vni == 2);
    try {
      com.create(topo, optical, req);
      FAIL("expected VNI_POOL_EXHAUSTED");
    } catch (const DomainError& e) {
      CHECK(e.code() == ErrorCode::VniPoolExhausted);
    }
    // Freed identifiers return to the pool, lowest first.
    ConnectivityService removed = com.remove(topo, optical, [&] {
      for (const auto& [id, s] : com.services()) {
        if (s.state == ServiceState::Active && s.vni == 1) {
          return id;
        }
      }
      return std::string();
    }());
    CHECK(com.create(topo, optical, req).vni == 1);
  }
}

TEST_CASE("failed creates leave pools and spectrum exactly as they were") {
  Topology topo = demo5();
  OpticalNetwork optical;
  Com com(topo);
  CreateRequest good;
  good.sip_a = "AMEN2-dc";
  good.sip_z = "MCEN2-dc";
  good.layer = ServiceLayer::L3;
  good.bandwidth_gbps = 10.0;
  com.create(topo, optical, good);

  SpectrumState spectrum_before = optical.spectrum();
  json com_pools_before = com.to_json()["vnis_used"];

  CreateRequest bad = good;
  bad.bandwidth_gbps = 400.0;  // beyond every rate
  CHECK_THROWS_AS(com.create(topo, optical, bad), DomainError);

  CHECK(optical.spectrum() == spectrum_before);
  CHECK(com.to_json()["vnis_used"] == com_pools_before);
}

TEST_CASE("render_device_configs emits transponders plus blocker rules") {
  Topology topo = demo5();
  OpticalNetwork optical;
  Com com(topo);
  CreateRequest req;
  req.sip_a = "AMEN1-dc";
  req.sip_z = "MCEN1-dc";
  req.layer = ServiceLayer::L2;
  req.bandwidth_gbps = 10.0;
  std::string id = com.create(topo, optical, req).id;

  auto configs = com.render_device_configs(topo, optical, id);
  // Channel 0 between AMEN1 and MCEN1: 2 transponders + BLOCK at AMEN2.
  REQUIRE(configs.size() == 3);
  CHECK(configs[0].device == "AMEN1");
  CHECK(configs[0].kind == DeviceKind::Transponder);
  CHECK(configs[0].dialect == Dialect::OpenconfigLike);
  CHECK(configs[0].payload["frequency-thz"] == doctest::Approx(191.6));
  CHECK(configs[0].payload["vendor"] == "A");
  CHECK(configs[1].device == "AMEN2");
  CHECK(configs[1].kind == DeviceKind::Blocker);
  CHECK(configs[1].dialect == Dialect::OpenroadmLike);
  CHECK(configs[1].payload["action"] == "block");
  CHECK(configs[2].device == "MCEN1");
  CHECK(configs[2].payload["vendor"] == "B");

  SUBCASE("rendering is pure: two calls, identical bytes") {
    json once = json::array();
    json twice = json::array();
    for (const DeviceConfig& c : com.render_device_configs(topo, optical, id)) {
      once.push_back(device_config_to_json(c));
    }
    for (const DeviceConfig& c : com.render_device_configs(topo, optical, id)) {
      twice.push_back(device_config_to_json(c));
    }
    CHECK(once.dump() == twice.dump());
  }
}

TEST_CASE("channel index 10 renders at 192.1 THz") {
  json doc = two_node_doc(80);
  Topology topo = load_topology(doc).topology;
  OpticalNetwork optical;
  Com com(topo);
  CreateRequest req;
  req.sip_a = "MCEN1-t0";
  req.sip_z = "MCEN2-t0";
  req.layer = ServiceLayer::Optical;
  std::string last;
  for (int i = 0; i <= 10; ++i) {
    last = com.create(topo, optical, req).id;
  }
  auto configs = com.render_device_configs(topo, optical, last);
  REQUIRE(configs.size() == 2);  // no interior, no neighbours: no blockers
  CHECK(configs[0].payload["frequency-thz"].get<double>() ==
        doctest::Approx(192.1).epsilon(1e-12));
}

TEST_CASE("get returns snapshots in every lifecycle state") {
  Topology topo = demo5();
  OpticalNetwork optical;
  Com com(topo);
  CreateRequest req;
  req.sip_a = "AMEN3-dc";
  req.sip_z = "MCEN2-dc";
  req.layer = ServiceLayer::L3;
  req.bandwidth_gbps = 1.0;
  std::string id = com.create(topo, optical, req).id;
  CHECK(com.get(id).state == ServiceState::Active);
  com.remove(topo, optical, id);
  CHECK(com.get(id).state == ServiceState::Deleted);
  CHECK(com.get(id).history.back() == ServiceState::Deleted);
  try {
    com.get("svc-777777");
    FAIL("expected UNKNOWN_SERVICE");
  } catch (const DomainError& e) {
    CHECK(e.code() == ErrorCode::UnknownService);
  }
  // Rendering a deleted service is INVALID_STATE.
  try {
    com.render_device_configs(topo, optical, id);
    FAIL("expected INVALID_STATE");
  } catch (const DomainError& e) {
    CHECK(e.code() == ErrorCode::InvalidState);
  }
}

TEST_CASE("VLAN and VNI uniqueness hold under random churn") {
  Topology topo = demo5();
  OpticalNetwork optical;
  Com com(topo);
  RandomStream rng(5150, 0);
  std::vector<std::string> active;
  const char* dc_sips[] = {"MCEN1-dc", "AMEN1-dc", "AMEN2-dc", "AMEN3-dc",
                           "MCEN2-dc"};

  for (int step = 0; step < 400; ++step) {
    if (!active.empty() && rng.pick(3) == 0) {
      std::size_t pos = rng.pick(active.size());
      com.remove(topo, optical, active[pos]);
      active.erase(active.begin() + static_cast<long>(pos));
    } else {
      CreateRequest req;
      req.sip_a = dc_sips[rng.pick(5)];
      req.sip_z = dc_sips[rng.pick(5)];
      req.layer = rng.pick(2) == 0 ? ServiceLayer::L2 : ServiceLayer::L3;
      req.bandwidth_gbps = 1.0 + rng.uniform(0.0, 40.0);
      try {
        active.push_back(com.create(topo, optical, req).id);
      } catch (const DomainError&) {
      }
    }
    // Invariants over all non-deleted services.
    std::set<std::uint32_t> vnis;
    std::map<std::string, std::set<int>> vlans_per_channel;
    std::map<std::string, double> load_per_channel;
    for (const auto& [id, svc] : com.services()) {
      if (svc.state != ServiceState::Active) {
        continue;
      }
      if (svc.vni) {
        CHECK(vnis.insert(*svc.vni).second);
      }
      if (svc.vlan_id) {
        CHECK(vlans_per_channel[*svc.underlying].insert(*svc.vlan_id).second);
      }
      if (svc.layer != ServiceLayer::Optical) {
        load_per_channel[*svc.underlying] += svc.bandwidth_gbps;
      }
    }
    for (const auto& [channel, load] : load_per_channel) {
      double rate =
          optical.config().format(optical.channel(channel).format).net_rate_gbps;
      CHECK(load <= rate + 1e-9);
    }
  }
}

TEST_CASE("COM state serialization round-trips") {
  Topology topo = demo5();
  OpticalNetwork optical;
  Com com(topo);
  CreateRequest req;
  req.sip_a = "AMEN1-dc";
  req.sip_z = "MCEN1-dc";
  req.layer = ServiceLayer::L2;
  req.bandwidth_gbps = 3.0;
  std::string id = com.create(topo, optical, req).id;
  com.create(topo, optical, req);
  com.remove(topo, optical, id);

  json j = com.to_json();
  Com back = Com::from_json(topo, j);
  CHECK(back.to_json() == j);
}
