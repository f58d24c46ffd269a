#include <doctest.h>

#include <set>

#include "metrosim/rng.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace metrosim;
using namespace metrosim::testing;



TEST_CASE("a latency bound pulls analytics to the camera's edge DC") {
  Topology topo = demo5();
  Orchestrator orch(topo);
  Nsd nsd;
  nsd.vnfs.push_back(make_vnf("analytics", VnfKind::Analytics, 16, 32, 0.0,
                         {DcTier::Edc, DcTier::Rdc, DcTier::Cdc}));
  nsd.links.push_back(
      make_link(std::string(kCameraSourcePrefix) + "AMEN2", "analytics", 0.6, 5.0));
  PlacementPlan plan = orch.place(nsd, topo, LatencyParams{});
  REQUIRE(plan.feasible);
  CHECK(plan.assignment.at("analytics") == "AMEN2");
  CHECK(plan.cost == 0.0);
}

TEST_CASE("symmetric CSM placement breaks ties lexicographically") {
  // Make both MCEN DCs equally attractive: no links at all.
  Topology topo = demo5();
  Orchestrator orch(topo);
  Nsd nsd;
  nsd.vnfs.push_back(
      make_vnf("csm", VnfKind::Csm, 8, 32, 2.0, {DcTier::Rdc, DcTier::Cdc}));
  PlacementPlan plan = orch.place(nsd, topo, LatencyParams{});
  REQUIRE(plan.feasible);
  CHECK(plan.assignment.at("csm") == "MCEN1");  // MCEN1 < MCEN2
}

TEST_CASE("aggregate overload is reported infeasible") {
  Topology topo = demo5();
  Orchestrator orch(topo);
  Nsd nsd;
  // 5 DCs hold 288 cores in total.
  nsd.vnfs.push_back(make_vnf("hog1", VnfKind::Analytics, 200, 8, 0.0,
                         {DcTier::Edc, DcTier::Rdc, DcTier::Cdc}));
  nsd.vnfs.push_back(make_vnf("hog2", VnfKind::Analytics, 200, 8, 0.0,
                         {DcTier::Edc, DcTier::Rdc, DcTier::Cdc}));
  PlacementPlan plan = orch.place(nsd, topo, LatencyParams{});
  CHECK_FALSE(plan.feasible);
  CHECK_FALSE(plan.violations.empty());
}

TEST_CASE("invalid NSDs are rejected") {
  Topology topo = demo5();
  std::vector<VimState> vims = Orchestrator(topo).vim_list();
  SUBCASE("duplicate names") {
    Nsd nsd;
    nsd.vnfs.push_back(make_vnf("x", VnfKind::Nat, 1, 1, 0.0, {DcTier::Edc}));
    nsd.vnfs.push_back(make_vnf("x", VnfKind::Nat, 1, 1, 0.0, {DcTier::Edc}));
    CHECK_THROWS_AS(place_vnfs(nsd, topo, vims, LatencyParams{}), DomainError);
  }
  SUBCASE("dangling link endpoint") {
    Nsd nsd;
    nsd.vnfs.push_back(make_vnf("x", VnfKind::Nat, 1, 1, 0.0, {DcTier::Edc}));
    nsd.links.push_back(make_link("x", "ghost", 1.0));
    CHECK_THROWS_AS(place_vnfs(nsd, topo, vims, LatencyParams{}), DomainError);
  }
  SUBCASE("pin to a node that does not exist") {
    Nsd nsd;
    nsd.vnfs.push_back(
        make_vnf("x", VnfKind::Nat, 1, 1, 0.0, {DcTier::Edc}, "NOWHERE"));
    try {
      place_vnfs(nsd, topo, vims, LatencyParams{});
      FAIL("expected INVALID_NSD");
    } catch (const DomainError& e) {
      CHECK(e.code() == ErrorCode::InvalidNsd);
    }
  }
}

TEST_CASE("branch-and-bound matches exhaustive enumeration") {
  RandomStream rng(31337, 0);
  LatencyParams latency;
  int feasible_seen = 0;
  for (int trial = 0; trial < 60; ++trial) {
    PlacementInstance inst = random_placement_instance(rng, 8, 6);
    Topology topo = load_topology(inst.doc).topology;
    std::vector<VimState> vims = Orchestrator(topo).vim_list();
    PlacementPlan plan = place_vnfs(inst.nsd, topo, vims, latency);
    EnumerationResult oracle =
        enumerate_placements(inst.nsd, topo, vims, latency);
    REQUIRE(plan.feasible == oracle.feasible);
    if (plan.feasible) {
      ++feasible_seen;
      CHECK(plan.cost == oracle.cost);  // exact equality by construction
      CHECK(verify_plan(inst.nsd, topo, vims, latency, plan).empty());
    }
  }
  CHECK(feasible_seen > 10);  // the generator must not be degenerate
}

TEST_CASE("greedy plans pass the independent checker") {
  RandomStream rng(404, 0);
  LatencyParams latency;
  int feasible_seen = 0;
  for (int trial = 0; trial < 60; ++trial) {
    PlacementInstance inst = random_placement_instance(rng, 14, 6);
    while (inst.nsd.vnfs.size() <= 8) {  // force the greedy path
      inst.nsd.vnfs.push_back(make_vnf(
          "pad" + std::to_string(inst.nsd.vnfs.size()), VnfKind::Nat, 1, 1,
          0.0, {DcTier::Edc, DcTier::Rdc, DcTier::Cdc}));
    }
    Topology topo = load_topology(inst.doc).topology;
    std::vector<VimState> vims = Orchestrator(topo).vim_list();
    PlacementPlan plan = place_vnfs(inst.nsd, topo, vims, latency);
    if (plan.feasible) {
      ++feasible_seen;
      CHECK(verify_plan(inst.nsd, topo, vims, latency, plan).empty());
    }
  }
  CHECK(feasible_seen > 10);
}

TEST_CASE("the default surveillance slice comes up whole") {
  Topology topo = demo5();
  OpticalNetwork optical;
  Com com(topo);
  Orchestrator orch(topo);
  Nsd nsd = Nsd::from_json(default_nsd_doc());

  SliceInstance inst = orch.instantiate(topo, optical, com, "surv-1", nsd,
                                        LatencyParams{});
  REQUIRE(inst.state == SliceState::Active);
  CHECK(inst.plan.assignment.at("csm") == "MCEN1");
  CHECK(inst.plan.assignment.at("css-amen1") == "AMEN1");
  CHECK(inst.plan.assignment.at("analytics") == "AMEN2");
  CHECK(inst.plan.assignment.at("storage-db") == "MCEN1");

  // Inter-node links: 3 css->csm, 3 archive, 3 ptz, 2 analytics feeds.
  CHECK(inst.service_ids.size() == 11);
  std::set<std::uint32_t> vnis;
  for (const std::string& id : inst.service_ids) {
    ConnectivityService svc = com.get(id);
    CHECK(svc.state == ServiceState::Active);
    CHECK(svc.layer == ServiceLayer::L3);
    REQUIRE(svc.vni.has_value());
    CHECK(vnis.insert(*svc.vni).second);
  }
  // Shared SIP pairs ride shared channels: 5 media channels in total.
  CHECK(optical.channels().size() == 5);

  // VIM accounting: AMEN2 hosts css (8/16/10) + analytics (16/32/0).
  const VimState& amen2 = orch.vims().at("AMEN2");
  CHECK(amen2.free_cpu == 32 - 24);
  CHECK(amen2.free_ram == 64 - 48);
  CHECK(amen2.reservations.at("surv-1").cpu_cores == 24);

  SUBCASE("same id twice is DUPLICATE_SLICE") {
    try {
      orch.instantiate(topo, optical, com, "surv-1", nsd, LatencyParams{});
      FAIL("expected DUPLICATE_SLICE");
    } catch (const DomainError& e) {
      CHECK(e.code() == ErrorCode::DuplicateSlice);
    }
  }

  SUBCASE("teardown restores every VIM exactly and frees the spectrum") {
    SliceInstance down = orch.teardown(topo, optical, com, "surv-1");
    CHECK(down.state == SliceState::TornDown);
    CHECK(orch.vims().at("AMEN2").free_cpu == 32);
    CHECK(orch.vims().at("MCEN1").free_cpu == 64);
    CHECK(orch.vims().at("AMEN2").reservations.empty());
    CHECK(optical.spectrum().occupied.empty());
    try {
      orch.teardown(topo, optical, com, "surv-1");
      FAIL("expected INVALID_STATE");
    } catch (const DomainError& e) {
      CHECK(e.code() == ErrorCode::InvalidState);
    }
  }
}

TEST_CASE("teardown of one slice leaves another untouched") {
  Topology topo = demo5();
  OpticalNetwork optical;
  Com com(topo);
  Orchestrator orch(topo);
  Nsd small;
  small.vnfs.push_back(make_vnf("probe-a", VnfKind::Nat, 2, 2, 0.0, {DcTier::Edc}));
  small.vnfs.push_back(make_vnf("probe-b", VnfKind::Nat, 2, 2, 0.0,
                           {DcTier::Rdc, DcTier::Cdc}, "MCEN2"));
  small.links.push_back(make_link("probe-a", "probe-b", 1.0));

  SliceInstance a = orch.instantiate(topo, optical, com, "a", small,
                                     LatencyParams{});
  SliceInstance b = orch.instantiate(topo, optical, com, "b", small,
                                     LatencyParams{});
  REQUIRE(a.state == SliceState::Active);
  REQUIRE(b.state == SliceState::Active);

  orch.teardown(topo, optical, com, "a");
  for (const std::string& id : orch.slice("b").service_ids) {
    CHECK(com.get(id).state == ServiceState::Active);
  }
  CHECK(orch.vims().at("MCEN2").reservations.count("b") == 1);
  CHECK(orch.vims().at("MCEN2").reservations.count("a") == 0);
}

TEST_CASE("unknown slice lookups fail cleanly") {
  Topology topo = demo5();
  OpticalNetwork optical;
  Com com(topo);
  Orchestrator orch(topo);
  try {
    orch.teardown(topo, optical, com, "nope");
    FAIL("expected UNKNOWN_SLICE");
  } catch (const DomainError& e) {
    CHECK(e.code() == ErrorCode::UnknownSlice);
  }
}

TEST_CASE("a WIM failure mid-instantiation rolls everything back") {
  json doc = demo5_doc();
  doc["grid"]["channel_count"] = 2;  // starve the optical layer
  Topology topo = load_topology(doc).topology;
  OpticalNetwork optical;
  Com com(topo);
  Orchestrator orch(topo);
  // Fill both channels on span s1 so the css->csm services cannot all fit.
  optical.provision(topo, "MCEN1", "AMEN1", FormatName::Dp16Qam, 0.0);
  optical.provision(topo, "MCEN1", "AMEN1", FormatName::Dp16Qam, 0.0);

  json optical_before = optical.to_json();
  json com_before = com.to_json();
  json orch_before = orch.to_json();

  Nsd nsd = Nsd::from_json(default_nsd_doc());
  SliceInstance inst =
      orch.instantiate(topo, optical, com, "doomed", nsd, LatencyParams{});
  CHECK(inst.state == SliceState::Failed);
  CHECK(inst.failure_cause == "OPTICAL_BLOCKED");
  CHECK(inst.service_ids.empty());

  CHECK(optical.to_json() == optical_before);
  CHECK(com.to_json() == com_before);
  CHECK(orch.to_json() == orch_before);
}

TEST_CASE("every injected fault leaves the state byte-identical") {
  Topology topo = demo5();
  Nsd nsd = Nsd::from_json(default_nsd_doc());

  // First, record the labels of every internal step.
  std::vector<std::string> steps;
  {
    OpticalNetwork optical;
    Com com(topo);
    Orchestrator orch(topo);
    orch.set_fault_hook([&](const std::string& s) { steps.push_back(s); });
    SliceInstance ok =
        orch.instantiate(topo, optical, com, "probe", nsd, LatencyParams{});
    REQUIRE(ok.state == SliceState::Active);
  }
  CHECK(steps.size() >= 5);

  for (std::size_t fail_at = 0; fail_at < steps.size(); ++fail_at) {
    OpticalNetwork optical;
    Com com(topo);
    Orchestrator orch(topo);
    // Pre-existing traffic must survive the rollback too.
    CreateRequest req;
    req.sip_a = "AMEN1-dc";
    req.sip_z = "MCEN2-dc";
    req.layer = ServiceLayer::L3;
    req.bandwidth_gbps = 4.0;
    com.create(topo, optical, req);

    json optical_before = optical.to_json();
    json com_before = com.to_json();
    json orch_before = orch.to_json();

    std::size_t counter = 0;
    orch.set_fault_hook([&](const std::string&) {
      if (counter++ == fail_at) {
        fail(ErrorCode::InvalidParams, "injected fault");
      }
    });
    SliceInstance inst =
        orch.instantiate(topo, optical, com, "atomic", nsd, LatencyParams{});
    CHECK(inst.state == SliceState::Failed);
    CHECK(optical.to_json() == optical_before);
    CHECK(com.to_json() == com_before);
    CHECK(orch.to_json() == orch_before);
  }
}

TEST_CASE("co-located endpoints create no connectivity service") {
  Topology topo = demo5();
  OpticalNetwork optical;
  Com com(topo);
  Orchestrator orch(topo);
  Nsd nsd;
  nsd.vnfs.push_back(make_vnf("a", VnfKind::Css, 2, 2, 0.0, {DcTier::Edc}, "AMEN1"));
  nsd.vnfs.push_back(make_vnf("b", VnfKind::Dm, 2, 2, 0.0, {DcTier::Edc}, "AMEN1"));
  nsd.links.push_back(make_link("a", "b", 3.0));
  SliceInstance inst =
      orch.instantiate(topo, optical, com, "local", nsd, LatencyParams{});
  REQUIRE(inst.state == SliceState::Active);
  CHECK(inst.service_ids.empty());
  CHECK(inst.plan.cost == 0.0);
  CHECK(optical.channels().empty());
}

TEST_CASE("orchestrator serialization round-trips") {
  Topology topo = demo5();
  OpticalNetwork optical;
  Com com(topo);
  Orchestrator orch(topo);
  Nsd nsd = Nsd::from_json(default_nsd_doc());
  orch.instantiate(topo, optical, com, "s1", nsd, LatencyParams{});
  json j = orch.to_json();
  Orchestrator back = Orchestrator::from_json(j);
  CHECK(back.to_json() == j);
}
