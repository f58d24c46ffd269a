#include "metrosim/nfv.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace metrosim {

const char* vnf_kind_name(VnfKind k) {
  switch (k) {
    case VnfKind::Csm: return "CSM";
    case VnfKind::Css: return "CSS";
    case VnfKind::Dm: return "DM";
    case VnfKind::Analytics: return "ANALYTICS";
    case VnfKind::StorageDb: return "STORAGE_DB";
    case VnfKind::Nat: return "NAT";
    case VnfKind::Firewall: return "FIREWALL";
    case VnfKind::Accounting: return "ACCOUNTING";
  }
  return "?";
}

VnfKind parse_vnf_kind(const std::string& s) {
  for (VnfKind k : {VnfKind::Csm, VnfKind::Css, VnfKind::Dm, VnfKind::Analytics,
                    VnfKind::StorageDb, VnfKind::Nat, VnfKind::Firewall,
                    VnfKind::Accounting}) {
    if (s == vnf_kind_name(k)) {
      return k;
    }
  }
  fail(ErrorCode::ParseError, "unknown VNF kind '" + s + "'");
}

const char* slice_state_name(SliceState s) {
  switch (s) {
    case SliceState::Active: return "ACTIVE";
    case SliceState::Failed: return "FAILED";
    case SliceState::TornDown: return "TORN_DOWN";
  }
  return "?";
}

namespace {

DcTier parse_tier_token(const std::string& s) {
  if (s == "EDC") return DcTier::Edc;
  if (s == "RDC") return DcTier::Rdc;
  if (s == "CDC") return DcTier::Cdc;
  fail(ErrorCode::ParseError, "unknown DC tier '" + s + "'");
}

bool is_anchor(const std::string& endpoint) {
  return endpoint.rfind(kCameraSourcePrefix, 0) == 0;
}

std::string anchor_node(const std::string& endpoint) {
  return endpoint.substr(std::string(kCameraSourcePrefix).size());
}

}  // namespace

Nsd Nsd::from_json(const json& j) {
  check_fields(j, "nsd", {"vnfs", "links"});
  Nsd nsd;
  const json& vnfs = require_field(j, "nsd", "vnfs");
  if (!vnfs.is_array()) {
    fail(ErrorCode::ParseError, "nsd: 'vnfs' must be a list");
  }
  for (const json& vj : vnfs) {
    const std::string base = "nsd.vnfs[]";
    check_fields(vj, base,
                 {"name", "kind", "cpu_cores", "ram_gb", "storage_tb",
                  "allowed_tiers", "pin_node"});
    VnfDescriptor d;
    d.name = get_string(vj, base, "name");
    const std::string context = "vnf '" + d.name + "'";
    d.kind = parse_vnf_kind(get_string(vj, context, "kind"));
    d.cpu_cores = static_cast<int>(get_integer(vj, context, "cpu_cores"));
    d.ram_gb = static_cast<int>(get_integer(vj, context, "ram_gb"));
    d.storage_tb = get_number(vj, context, "storage_tb");
    const json& tiers = require_field(vj, context, "allowed_tiers");
    if (!tiers.is_array()) {
      fail(ErrorCode::ParseError, context + ": 'allowed_tiers' must be a list");
    }
    for (const json& t : tiers) {
      d.allowed_tiers.insert(parse_tier_token(t.get<std::string>()));
    }
    d.pin_node = opt_string(vj, context, "pin_node");
    nsd.vnfs.push_back(std::move(d));
  }
  if (j.contains("links")) {
    const json& links = j.at("links");
    if (!links.is_array()) {
      fail(ErrorCode::ParseError, "nsd: 'links' must be a list");
    }
    for (const json& lj : links) {
      const std::string base = "nsd.links[]";
      check_fields(lj, base, {"from", "to", "bandwidth_gbps", "max_latency_ms"});
      VirtualLink l;
      l.from_vnf = get_string(lj, base, "from");
      l.to_vnf = get_string(lj, base, "to");
      l.bandwidth_gbps = get_number(lj, base, "bandwidth_gbps");
      l.max_latency_ms = opt_number(lj, base, "max_latency_ms");
      nsd.links.push_back(std::move(l));
    }
  }
  return nsd;
}

json Nsd::to_json() const {
  json vjs = json::array();
  for (const VnfDescriptor& d : vnfs) {
    json tiers = json::array();
    for (DcTier t : d.allowed_tiers) {
      tiers.push_back(dc_tier_name(t));
    }
    json vj{{"name", d.name},
            {"kind", vnf_kind_name(d.kind)},
            {"cpu_cores", d.cpu_cores},
            {"ram_gb", d.ram_gb},
            {"storage_tb", d.storage_tb},
            {"allowed_tiers", tiers}};
    if (d.pin_node) {
      vj["pin_node"] = *d.pin_node;
    }
    vjs.push_back(std::move(vj));
  }
  json ljs = json::array();
  for (const VirtualLink& l : links) {
    json lj{{"from", l.from_vnf},
            {"to", l.to_vnf},
            {"bandwidth_gbps", l.bandwidth_gbps}};
    if (l.max_latency_ms) {
      lj["max_latency_ms"] = *l.max_latency_ms;
    }
    ljs.push_back(std::move(lj));
  }
  return json{{"vnfs", vjs}, {"links", ljs}};
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Placement instance after NSD validation and endpoint resolution.
struct PlacementProblem {
  const Nsd* nsd = nullptr;
  std::vector<std::string> candidates;  // DC nodes with a VIM, sorted
  std::map<std::string, const VimState*> vim_by_node;

  struct End {
    int vnf = -1;            // index into nsd->vnfs, or
    std::string anchor;      // fixed node for CAMERA_SOURCE endpoints
  };
  struct Link {
    End a, b;
    double bandwidth = 0.0;
    std::optional<double> bound_ms;
  };
  std::vector<Link> links;

  // Pairwise node latency (ms); kInf when no operational path exists.
  std::map<std::pair<std::string, std::string>, double> latency;

  double lat(const std::string& a, const std::string& b) const {
    if (a == b) {
      return 0.0;
    }
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    return latency.at(key);
  }

  std::string end_node(const End& e,
                       const std::map<std::string, std::string>& assign) const {
    if (e.vnf < 0) {
      return e.anchor;
    }
    auto it = assign.find(nsd->vnfs[static_cast<std::size_t>(e.vnf)].name);
    return it == assign.end() ? std::string() : it->second;
  }
};

void validate_nsd(const Nsd& nsd, const Topology& topo) {
  std::map<std::string, int> names;
  for (std::size_t i = 0; i < nsd.vnfs.size(); ++i) {
    const VnfDescriptor& d = nsd.vnfs[i];
    if (d.name.empty()) {
      fail(ErrorCode::InvalidNsd, "VNF with empty name");
    }
    if (!names.emplace(d.name, static_cast<int>(i)).second) {
      fail(ErrorCode::InvalidNsd, "duplicate VNF name '" + d.name + "'");
    }
    if (d.cpu_cores <= 0 || d.ram_gb <= 0 || d.storage_tb < 0.0) {
      fail(ErrorCode::InvalidNsd,
           "VNF '" + d.name + "' has non-positive resource demands");
    }
    if (d.allowed_tiers.empty()) {
      fail(ErrorCode::InvalidNsd, "VNF '" + d.name + "' allows no DC tier");
    }
    if (d.pin_node && !topo.has_node(*d.pin_node)) {
      fail(ErrorCode::InvalidNsd,
           "VNF '" + d.name + "' pinned to unknown node '" + *d.pin_node + "'");
    }
  }
  for (const VirtualLink& l : nsd.links) {
    for (const std::string& end : {l.from_vnf, l.to_vnf}) {
      if (is_anchor(end)) {
        if (!topo.has_node(anchor_node(end))) {
          fail(ErrorCode::InvalidNsd,
               "link anchor '" + end + "' names an unknown node");
        }
      } else if (!names.count(end)) {
        fail(ErrorCode::InvalidNsd,
             "link endpoint '" + end + "' is not a VNF in this NSD");
      }
    }
    if (l.bandwidth_gbps <= 0.0) {
      fail(ErrorCode::InvalidNsd, "link bandwidth must be > 0");
    }
    if (l.max_latency_ms && *l.max_latency_ms <= 0.0) {
      fail(ErrorCode::InvalidNsd, "link latency bound must be > 0");
    }
  }
}

PlacementProblem build_problem(const Nsd& nsd, const Topology& topo,
                               const std::vector<VimState>& vims,
                               const LatencyParams& latency) {
  validate_nsd(nsd, topo);
  PlacementProblem p;
  p.nsd = &nsd;
  for (const VimState& v : vims) {
    const Node& n = topo.node(v.node);
    if (!n.dc) {
      fail(ErrorCode::InvalidParams,
           "VIM at '" + v.node + "' has no data center");
    }
    p.candidates.push_back(v.node);
    p.vim_by_node[v.node] = &v;
  }
  std::sort(p.candidates.begin(), p.candidates.end());

  std::map<std::string, int> names;
  for (std::size_t i = 0; i < nsd.vnfs.size(); ++i) {
    names[nsd.vnfs[i].name] = static_cast<int>(i);
  }
  std::vector<std::string> latency_nodes = p.candidates;
  for (const VirtualLink& l : nsd.links) {
    PlacementProblem::Link link;
    link.bandwidth = l.bandwidth_gbps;
    link.bound_ms = l.max_latency_ms;
    auto resolve = [&](const std::string& end) {
      PlacementProblem::End e;
      if (is_anchor(end)) {
        e.anchor = anchor_node(end);
        latency_nodes.push_back(e.anchor);
      } else {
        e.vnf = names.at(end);
      }
      return e;
    };
    link.a = resolve(l.from_vnf);
    link.b = resolve(l.to_vnf);
    p.links.push_back(std::move(link));
  }

  std::sort(latency_nodes.begin(), latency_nodes.end());
  latency_nodes.erase(std::unique(latency_nodes.begin(), latency_nodes.end()),
                      latency_nodes.end());
  for (std::size_t i = 0; i < latency_nodes.size(); ++i) {
    for (std::size_t k = i + 1; k < latency_nodes.size(); ++k) {
      double ms = kInf;
      try {
        OpticalPath path = route_path(topo, latency_nodes[i], latency_nodes[k]);
        ms = compute_latency(topo, path.hops, latency, {});
      } catch (const DomainError&) {
        // unreachable pairs keep kInf
      }
      p.latency[{latency_nodes[i], latency_nodes[k]}] = ms;
    }
  }
  return p;
}

// Canonical objective: bandwidth-weighted latency summed in NSD link order.
// Every solver and checker sums through this one function so costs compare
// exactly.
double plan_cost(const PlacementProblem& p,
                 const std::map<std::string, std::string>& assign) {
  double cost = 0.0;
  for (const auto& link : p.links) {
    std::string na = p.end_node(link.a, assign);
    std::string nb = p.end_node(link.b, assign);
    cost += link.bandwidth * p.lat(na, nb);
  }
  return cost;
}

struct Usage {
  int cpu = 0;
  int ram = 0;
  double storage = 0.0;
};

bool fits(const VimState& vim, const Usage& used, const VnfDescriptor& d) {
  return used.cpu + d.cpu_cores <= vim.free_cpu &&
         used.ram + d.ram_gb <= vim.free_ram &&
         used.storage + d.storage_tb <= vim.free_storage_tb + 1e-12;
}

// Candidate nodes for one VNF considering tier, pin, stand-alone capacity
// and bounds on links whose other end is a fixed anchor.
std::vector<std::string> vnf_candidates(const PlacementProblem& p,
                                        const Topology& topo, int vnf_index) {
  const VnfDescriptor& d = p.nsd->vnfs[static_cast<std::size_t>(vnf_index)];
  std::vector<std::string> out;
  for (const std::string& node : p.candidates) {
    if (d.pin_node && *d.pin_node != node) {
      continue;
    }
    const Node& n = topo.node(node);
    if (!d.allowed_tiers.count(n.dc->tier)) {
      continue;
    }
    const VimState& vim = *p.vim_by_node.at(node);
    if (!fits(vim, Usage{}, d)) {
      continue;
    }
    bool ok = true;
    for (const auto& link : p.links) {
      if (!link.bound_ms) {
        continue;
      }
      const PlacementProblem::End* other = nullptr;
      if (link.a.vnf == vnf_index) {
        other = &link.b;
      } else if (link.b.vnf == vnf_index) {
        other = &link.a;
      } else {
        continue;
      }
      if (other->vnf >= 0) {
        continue;  // both ends free; checked when the pair is assigned
      }
      if (p.lat(node, other->anchor) > *link.bound_ms) {
        ok = false;
        break;
      }
    }
    if (ok) {
      out.push_back(node);
    }
  }
  return out;
}

struct ExactSolver {
  const PlacementProblem& p;
  const Topology& topo;
  std::vector<std::vector<std::string>> candidates;  // per vnf
  std::map<std::string, Usage> used;
  std::map<std::string, std::string> assign;
  std::map<std::string, std::string> best_assign;
  double best_cost = kInf;
  bool found = false;

  ExactSolver(const PlacementProblem& problem, const Topology& t)
      : p(problem), topo(t) {
    for (std::size_t i = 0; i < p.nsd->vnfs.size(); ++i) {
      candidates.push_back(vnf_candidates(p, topo, static_cast<int>(i)));
    }
  }

  // Checks links whose endpoints are both decided once `vnf` is placed;
  // returns the partial cost added by those links, or kInf on a violated
  // bound / unreachable pair.
  double step_cost(int vnf, const std::string& node) const {
    double added = 0.0;
    for (const auto& link : p.links) {
      bool involves_a = link.a.vnf == vnf;
      bool involves_b = link.b.vnf == vnf;
      if (!involves_a && !involves_b) {
        continue;
      }
      const PlacementProblem::End& other = involves_a ? link.b : link.a;
      std::string other_node;
      if (other.vnf < 0) {
        other_node = other.anchor;
      } else if (other.vnf == vnf) {
        other_node = node;  // self-loop link
      } else {
        auto it = assign.find(
            p.nsd->vnfs[static_cast<std::size_t>(other.vnf)].name);
        if (it == assign.end()) {
          continue;  // other end still free
        }
        other_node = it->second;
      }
      double ms = p.lat(node, other_node);
      if (ms == kInf) {
        return kInf;
      }
      if (link.bound_ms && ms > *link.bound_ms) {
        return kInf;
      }
      added += link.bandwidth * ms;
    }
    return added;
  }

  void search(std::size_t vnf, double partial) {
    if (vnf == p.nsd->vnfs.size()) {
      double cost = plan_cost(p, assign);  // canonical re-sum at the leaf
      if (!found || cost < best_cost) {
        found = true;
        best_cost = cost;
        best_assign = assign;
      }
      return;
    }
    const VnfDescriptor& d = p.nsd->vnfs[vnf];
    for (const std::string& node : candidates[vnf]) {
      Usage& u = used[node];
      if (!fits(*p.vim_by_node.at(node), u, d)) {
        continue;
      }
      double added = step_cost(static_cast<int>(vnf), node);
      if (added == kInf) {
        continue;
      }
      // Small slack keeps float noise in the incremental sum from pruning
      // an assignment whose canonical cost ties the incumbent.
      if (found && partial + added > best_cost + 1e-9) {
        continue;
      }
      assign[d.name] = node;
      u.cpu += d.cpu_cores;
      u.ram += d.ram_gb;
      u.storage += d.storage_tb;
      search(vnf + 1, partial + added);
      u.cpu -= d.cpu_cores;
      u.ram -= d.ram_gb;
      u.storage -= d.storage_tb;
      assign.erase(d.name);
    }
  }
};

PlacementPlan exact_solve(const PlacementProblem& p, const Topology& topo) {
  ExactSolver solver(p, topo);
  solver.search(0, 0.0);
  PlacementPlan plan;
  if (solver.found) {
    plan.feasible = true;
    plan.assignment = solver.best_assign;
    plan.cost = solver.best_cost;
    return plan;
  }
  plan.feasible = false;
  for (std::size_t i = 0; i < p.nsd->vnfs.size(); ++i) {
    if (solver.candidates[i].empty()) {
      plan.violations.push_back("VNF '" + p.nsd->vnfs[i].name +
                                "' has no node satisfying tier, pin, capacity "
                                "and anchor-latency constraints");
    }
  }
  if (plan.violations.empty()) {
    plan.violations.push_back(
        "no joint assignment satisfies capacity and latency bounds");
  }
  return plan;
}

PlacementPlan greedy_solve(const PlacementProblem& p, const Topology& topo) {
  // Highest-demand first; marginal cost against already-placed endpoints.
  std::vector<int> order(p.nsd->vnfs.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = static_cast<int>(i);
  }
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    const VnfDescriptor& a = p.nsd->vnfs[static_cast<std::size_t>(x)];
    const VnfDescriptor& b = p.nsd->vnfs[static_cast<std::size_t>(y)];
    if (a.cpu_cores != b.cpu_cores) return a.cpu_cores > b.cpu_cores;
    if (a.ram_gb != b.ram_gb) return a.ram_gb > b.ram_gb;
    if (a.storage_tb != b.storage_tb) return a.storage_tb > b.storage_tb;
    return a.name < b.name;
  });

  PlacementPlan plan;
  std::map<std::string, Usage> used;
  std::map<std::string, std::string> assign;
  for (int vnf : order) {
    const VnfDescriptor& d = p.nsd->vnfs[static_cast<std::size_t>(vnf)];
    std::string chosen;
    double chosen_cost = kInf;
    for (const std::string& node : vnf_candidates(p, topo, vnf)) {
      if (!fits(*p.vim_by_node.at(node), used[node], d)) {
        continue;
      }
      double marginal = 0.0;
      bool ok = true;
      for (const auto& link : p.links) {
        bool involves_a = link.a.vnf == vnf;
        bool involves_b = link.b.vnf == vnf;
        if (!involves_a && !involves_b) {
          continue;
        }
        const PlacementProblem::End& other = involves_a ? link.b : link.a;
        std::string other_node;
        if (other.vnf < 0) {
          other_node = other.anchor;
        } else if (other.vnf == vnf) {
          other_node = node;
        } else {
          auto it = assign.find(
              p.nsd->vnfs[static_cast<std::size_t>(other.vnf)].name);
          if (it == assign.end()) {
            continue;
          }
          other_node = it->second;
        }
        double ms = p.lat(node, other_node);
        if (ms == kInf || (link.bound_ms && ms > *link.bound_ms)) {
          ok = false;
          break;
        }
        marginal += link.bandwidth * ms;
      }
      if (!ok) {
        continue;
      }
      if (marginal < chosen_cost) {  // candidates iterate in id order
        chosen_cost = marginal;
        chosen = node;
      }
    }
    if (chosen.empty()) {
      plan.feasible = false;
      plan.violations.push_back("greedy found no feasible node for VNF '" +
                                d.name + "'");
      return plan;
    }
    assign[d.name] = chosen;
    Usage& u = used[chosen];
    u.cpu += d.cpu_cores;
    u.ram += d.ram_gb;
    u.storage += d.storage_tb;
  }
  plan.feasible = true;
  plan.assignment = assign;
  plan.cost = plan_cost(p, assign);
  return plan;
}

}  // namespace

PlacementPlan place_vnfs(const Nsd& nsd, const Topology& topo,
                         const std::vector<VimState>& vims,
                         const LatencyParams& latency) {
  PlacementProblem p = build_problem(nsd, topo, vims, latency);
  if (nsd.vnfs.empty()) {
    PlacementPlan plan;
    plan.feasible = true;
    return plan;
  }
  if (nsd.vnfs.size() <= 8 && p.candidates.size() <= 6) {
    return exact_solve(p, topo);
  }
  return greedy_solve(p, topo);
}

std::vector<std::string> verify_plan(const Nsd& nsd, const Topology& topo,
                                     const std::vector<VimState>& vims,
                                     const LatencyParams& latency,
                                     const PlacementPlan& plan) {
  std::vector<std::string> problems;
  PlacementProblem p = build_problem(nsd, topo, vims, latency);
  if (!plan.feasible) {
    problems.push_back("plan is marked infeasible");
    return problems;
  }
  std::map<std::string, Usage> used;
  for (const VnfDescriptor& d : nsd.vnfs) {
    auto it = plan.assignment.find(d.name);
    if (it == plan.assignment.end()) {
      problems.push_back("VNF '" + d.name + "' is unassigned");
      continue;
    }
    const std::string& node = it->second;
    if (!p.vim_by_node.count(node)) {
      problems.push_back("VNF '" + d.name + "' assigned to non-VIM node '" +
                         node + "'");
      continue;
    }
    if (d.pin_node && *d.pin_node != node) {
      problems.push_back("VNF '" + d.name + "' violates its pin");
    }
    if (!d.allowed_tiers.count(topo.node(node).dc->tier)) {
      problems.push_back("VNF '" + d.name + "' placed on a disallowed tier");
    }
    Usage& u = used[node];
    u.cpu += d.cpu_cores;
    u.ram += d.ram_gb;
    u.storage += d.storage_tb;
  }
  for (const auto& [node, u] : used) {
    const VimState& vim = *p.vim_by_node.at(node);
    if (u.cpu > vim.free_cpu || u.ram > vim.free_ram ||
        u.storage > vim.free_storage_tb + 1e-12) {
      problems.push_back("capacity exceeded at node '" + node + "'");
    }
  }
  for (std::size_t i = 0; i < p.links.size(); ++i) {
    const auto& link = p.links[i];
    std::string na = p.end_node(link.a, plan.assignment);
    std::string nb = p.end_node(link.b, plan.assignment);
    if (na.empty() || nb.empty()) {
      continue;  // already reported as unassigned
    }
    double ms = p.lat(na, nb);
    if (ms == kInf) {
      problems.push_back("link " + std::to_string(i) +
                         " joins unreachable nodes");
    } else if (link.bound_ms && ms > *link.bound_ms) {
      problems.push_back("link " + std::to_string(i) +
                         " exceeds its latency bound");
    }
  }
  if (problems.empty()) {
    double cost = plan_cost(p, plan.assignment);
    if (cost != plan.cost) {
      problems.push_back("plan cost does not match the objective");
    }
  }
  return problems;
}

Orchestrator::Orchestrator(const Topology& topo) {
  for (const Node& n : topo.nodes) {
    if (!n.dc) {
      continue;
    }
    VimState v;
    v.node = n.id;
    v.free_cpu = n.dc->cpu_cores;
    v.free_ram = n.dc->ram_gb;
    v.free_storage_tb = n.dc->storage_tb;
    vims_[n.id] = std::move(v);
  }
}

const SliceInstance& Orchestrator::slice(const std::string& id) const {
  auto it = slices_.find(id);
  if (it == slices_.end()) {
    fail(ErrorCode::UnknownSlice, "unknown slice '" + id + "'");
  }
  return it->second;
}

std::vector<VimState> Orchestrator::vim_list() const {
  std::vector<VimState> out;
  out.reserve(vims_.size());
  for (const auto& [node, vim] : vims_) {
    out.push_back(vim);
  }
  return out;
}

PlacementPlan Orchestrator::place(const Nsd& nsd, const Topology& topo,
                                  const LatencyParams& latency) const {
  return place_vnfs(nsd, topo, vim_list(), latency);
}

void Orchestrator::hook(const std::string& step) {
  if (fault_hook_) {
    fault_hook_(step);
  }
}

namespace {

// SIP used for inter-DC connectivity at a node: the DC port when one
// exists, otherwise the first transponder port.
const Sip& connectivity_sip(const AbstractedDomain& domain,
                            const std::string& node) {
  const Sip* fallback = nullptr;
  for (const Sip& s : domain.sips) {
    if (s.node != node) {
      continue;
    }
    if (s.kind == SipKind::DcPort) {
      return s;
    }
    if (fallback == nullptr) {
      fallback = &s;
    }
  }
  if (fallback == nullptr) {
    fail(ErrorCode::UnknownSip, "node '" + node + "' exposes no SIP");
  }
  return *fallback;
}

}  // namespace

SliceInstance Orchestrator::instantiate(const Topology& topo,
                                        OpticalNetwork& optical, Com& com,
                                        const std::string& id, const Nsd& nsd,
                                        const LatencyParams& latency) {
  if (slices_.count(id)) {
    fail(ErrorCode::DuplicateSlice, "slice '" + id + "' already exists");
  }

  // Snapshot for all-or-nothing semantics across the three stores.
  auto vims_backup = vims_;
  auto slices_backup = slices_;
  OpticalNetwork optical_backup = optical;
  Com com_backup = com;

  SliceInstance inst;
  inst.id = id;
  try {
    hook("placement");
    PlacementPlan plan = place(nsd, topo, latency);
    if (!plan.feasible) {
      json details = json::array();
      for (const std::string& v : plan.violations) {
        details.push_back(v);
      }
      fail(ErrorCode::PlacementInfeasible,
           "no feasible placement for slice '" + id + "'",
           json{{"violations", details}});
    }
    inst.plan = plan;

    for (const VnfDescriptor& d : nsd.vnfs) {
      const std::string& node = plan.assignment.at(d.name);
      VimState& vim = vims_.at(node);
      vim.free_cpu -= d.cpu_cores;
      vim.free_ram -= d.ram_gb;
      vim.free_storage_tb -= d.storage_tb;
      assert(vim.free_cpu >= 0 && vim.free_ram >= 0 &&
             vim.free_storage_tb >= -1e-9);
      VimUsage& usage = vim.reservations[id];
      usage.cpu_cores += d.cpu_cores;
      usage.ram_gb += d.ram_gb;
      usage.storage_tb += d.storage_tb;
      hook("vim_reserve:" + d.name);
    }

    std::size_t k = 0;
    for (const VirtualLink& link : nsd.links) {
      std::string node_a = is_anchor(link.from_vnf)
                               ? anchor_node(link.from_vnf)
                               : plan.assignment.at(link.from_vnf);
      std::string node_b = is_anchor(link.to_vnf)
                               ? anchor_node(link.to_vnf)
                               : plan.assignment.at(link.to_vnf);
      if (node_a == node_b) {
        continue;  // co-located endpoints need no connectivity service
      }
      CreateRequest req;
      req.sip_a = connectivity_sip(com.domain(), node_a).id;
      req.sip_z = connectivity_sip(com.domain(), node_b).id;
      req.layer = ServiceLayer::L3;
      req.bandwidth_gbps = link.bandwidth_gbps;
      const ConnectivityService& svc = com.create(topo, optical, req);
      inst.service_ids.push_back(svc.id);
      hook("wim_service:" + std::to_string(k++));
    }

    hook("activate");
    inst.state = SliceState::Active;
    slices_.emplace(id, inst);
    return inst;
  } catch (const DomainError& e) {
    vims_ = std::move(vims_backup);
    slices_ = std::move(slices_backup);
    optical = std::move(optical_backup);
    com = std::move(com_backup);
    inst.state = SliceState::Failed;
    inst.failure_cause = error_code_name(e.code());
    inst.service_ids.clear();
    inst.plan = PlacementPlan{};
    return inst;
  } catch (...) {
    vims_ = std::move(vims_backup);
    slices_ = std::move(slices_backup);
    optical = std::move(optical_backup);
    com = std::move(com_backup);
    throw;
  }
}

SliceInstance Orchestrator::teardown(const Topology& topo,
                                     OpticalNetwork& optical, Com& com,
                                     const std::string& id) {
  auto it = slices_.find(id);
  if (it == slices_.end()) {
    fail(ErrorCode::UnknownSlice, "unknown slice '" + id + "'");
  }
  SliceInstance& inst = it->second;
  if (inst.state != SliceState::Active) {
    fail(ErrorCode::InvalidState,
         "slice '" + id + "' is " + slice_state_name(inst.state) +
             ", not ACTIVE");
  }
  for (const std::string& svc : inst.service_ids) {
    com.remove(topo, optical, svc);
  }
  for (auto& [node, vim] : vims_) {
    auto res = vim.reservations.find(id);
    if (res == vim.reservations.end()) {
      continue;
    }
    vim.free_cpu += res->second.cpu_cores;
    vim.free_ram += res->second.ram_gb;
    vim.free_storage_tb += res->second.storage_tb;
    vim.reservations.erase(res);
  }
  inst.state = SliceState::TornDown;
  return inst;
}

json plan_to_json(const PlacementPlan& plan) {
  return json{{"assignment", plan.assignment},
              {"cost", plan.cost},
              {"feasible", plan.feasible},
              {"violations", plan.violations}};
}

json slice_to_json(const SliceInstance& slice) {
  json j{{"id", slice.id},
         {"plan", plan_to_json(slice.plan)},
         {"services", slice.service_ids},
         {"state", slice_state_name(slice.state)}};
  if (!slice.failure_cause.empty()) {
    j["failure_cause"] = slice.failure_cause;
  }
  return j;
}

json Orchestrator::to_json() const {
  json vims = json::object();
  for (const auto& [node, vim] : vims_) {
    json res = json::object();
    for (const auto& [slice_id, usage] : vim.reservations) {
      res[slice_id] = json{{"cpu_cores", usage.cpu_cores},
                           {"ram_gb", usage.ram_gb},
                           {"storage_tb", usage.storage_tb}};
    }
    vims[node] = json{{"node", vim.node},
                      {"free_cpu", vim.free_cpu},
                      {"free_ram", vim.free_ram},
                      {"free_storage_tb", vim.free_storage_tb},
                      {"reservations", res}};
  }
  json slices = json::object();
  for (const auto& [id, slice] : slices_) {
    slices[id] = slice_to_json(slice);
  }
  return json{{"vims", vims}, {"slices", slices}};
}

Orchestrator Orchestrator::from_json(const json& j) {
  Orchestrator orch;
  for (const auto& [node, vj] : j.at("vims").items()) {
    VimState v;
    v.node = vj.at("node").get<std::string>();
    v.free_cpu = vj.at("free_cpu").get<int>();
    v.free_ram = vj.at("free_ram").get<int>();
    v.free_storage_tb = vj.at("free_storage_tb").get<double>();
    for (const auto& [slice_id, uj] : vj.at("reservations").items()) {
      VimUsage usage;
      usage.cpu_cores = uj.at("cpu_cores").get<int>();
      usage.ram_gb = uj.at("ram_gb").get<int>();
      usage.storage_tb = uj.at("storage_tb").get<double>();
      v.reservations[slice_id] = usage;
    }
    orch.vims_[node] = std::move(v);
  }
  for (const auto& [id, sj] : j.at("slices").items()) {
    SliceInstance s;
    s.id = id;
    const json& pj = sj.at("plan");
    s.plan.assignment =
        pj.at("assignment").get<std::map<std::string, std::string>>();
    s.plan.cost = pj.at("cost").get<double>();
    s.plan.feasible = pj.at("feasible").get<bool>();
    s.plan.violations = pj.at("violations").get<std::vector<std::string>>();
    s.service_ids = sj.at("services").get<std::vector<std::string>>();
    std::string state = sj.at("state").get<std::string>();
    s.state = state == "ACTIVE" ? SliceState::Active
              : state == "FAILED" ? SliceState::Failed
                                  : SliceState::TornDown;
    if (sj.contains("failure_cause")) {
      s.failure_cause = sj.at("failure_cause").get<std::string>();
    }
    orch.slices_.emplace(id, std::move(s));
  }
  return orch;
}

}  // namespace metrosim
