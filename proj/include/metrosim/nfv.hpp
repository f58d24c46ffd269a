#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "metrosim/control.hpp"
#include "metrosim/latency.hpp"

namespace metrosim {

enum class VnfKind { Csm, Css, Dm, Analytics, StorageDb, Nat, Firewall, Accounting };

const char* vnf_kind_name(VnfKind k);
VnfKind parse_vnf_kind(const std::string& s);

// Prefix marking a fixed traffic source in virtual-link endpoints:
// "CAMERA_SOURCE@<node>" anchors one end of a link to that node.
inline constexpr const char* kCameraSourcePrefix = "CAMERA_SOURCE@";

struct VnfDescriptor {
  std::string name;
  VnfKind kind = VnfKind::Css;
  int cpu_cores = 1;
  int ram_gb = 1;
  double storage_tb = 0.0;
  std::set<DcTier> allowed_tiers;
  std::optional<std::string> pin_node;
};

struct VirtualLink {
  std::string from_vnf;  // VNF name or CAMERA_SOURCE@node
  std::string to_vnf;
  double bandwidth_gbps = 0.0;
  std::optional<double> max_latency_ms;
};

struct Nsd {
  std::vector<VnfDescriptor> vnfs;
  std::vector<VirtualLink> links;

  static Nsd from_json(const json& j);  // PARSE_ERROR / INVALID_NSD
  json to_json() const;
};

struct VimUsage {
  int cpu_cores = 0;
  int ram_gb = 0;
  double storage_tb = 0.0;
};

// Per-DC resource accounting. capacity = free + sum(reservations).
struct VimState {
  std::string node;
  int free_cpu = 0;
  int free_ram = 0;
  double free_storage_tb = 0.0;
  std::map<std::string, VimUsage> reservations;  // by slice id
};

struct PlacementPlan {
  std::map<std::string, std::string> assignment;  // VNF name -> node id
  double cost = 0.0;  // sum over links of bandwidth_gbps * path latency ms
  bool feasible = false;
  std::vector<std::string> violations;  // set when infeasible
};

// Minimizes bandwidth-weighted latency subject to tier/pin constraints, VIM
// capacities and per-link latency bounds. Exact branch-and-bound when
// |vnfs| <= 8 and DC count <= 6, deterministic greedy above that.
PlacementPlan place_vnfs(const Nsd& nsd, const Topology& topo,
                         const std::vector<VimState>& vims,
                         const LatencyParams& latency);

// Independent constraint checker: re-evaluates every constraint and the
// cost of a plan from scratch. Empty result means the plan is valid.
std::vector<std::string> verify_plan(const Nsd& nsd, const Topology& topo,
                                     const std::vector<VimState>& vims,
                                     const LatencyParams& latency,
                                     const PlacementPlan& plan);

enum class SliceState { Active, Failed, TornDown };

const char* slice_state_name(SliceState s);

struct SliceInstance {
  std::string id;
  PlacementPlan plan;
  std::vector<std::string> service_ids;
  SliceState state = SliceState::Active;
  std::string failure_cause;  // error code name when FAILED
};

// NFV orchestrator: VIM accounting plus atomic slice instantiation over the
// WIM (the COM service layer). Single-writer like the COM state.
class Orchestrator {
 public:
  Orchestrator() = default;
  explicit Orchestrator(const Topology& topo);  // VIMs at full DC capacity

  const std::map<std::string, VimState>& vims() const { return vims_; }
  const std::map<std::string, SliceInstance>& slices() const { return slices_; }
  const SliceInstance& slice(const std::string& id) const;  // UNKNOWN_SLICE

  std::vector<VimState> vim_list() const;

  PlacementPlan place(const Nsd& nsd, const Topology& topo,
                      const LatencyParams& latency) const;

  // Places, reserves VIM resources and creates one L3 service per
  // inter-node virtual link. All-or-nothing: any failure restores the
  // orchestrator, COM and optical state to the pre-call snapshot and
  // returns a FAILED instance carrying the cause.
  SliceInstance instantiate(const Topology& topo, OpticalNetwork& optical,
                            Com& com, const std::string& id, const Nsd& nsd,
                            const LatencyParams& latency);

  // Deletes the slice's services and releases its reservations.
  SliceInstance teardown(const Topology& topo, OpticalNetwork& optical,
                         Com& com, const std::string& id);

  // Test seam: invoked with a step label at each internal step of
  // instantiate(); a throwing hook exercises the rollback path.
  void set_fault_hook(std::function<void(const std::string&)> hook) {
    fault_hook_ = std::move(hook);
  }

  json to_json() const;
  static Orchestrator from_json(const json& j);

 private:
  void hook(const std::string& step);

  std::map<std::string, VimState> vims_;
  std::map<std::string, SliceInstance> slices_;
  std::function<void(const std::string&)> fault_hook_;
};

json plan_to_json(const PlacementPlan& plan);
json slice_to_json(const SliceInstance& slice);

}  // namespace metrosim
