#pragma once

// Independent oracles used by the unit and acceptance suites. Everything
// here recomputes results from first principles, never through the
// implementation paths under test.

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "metrosim/latency.hpp"
#include "metrosim/nfv.hpp"
#include "metrosim/optical.hpp"

namespace metrosim::testing {

// Erlang-B blocking probability by the standard recursion
// B(0) = 1, B(n) = a*B(n-1) / (n + a*B(n-1)).
inline double erlang_b(int servers, double offered_erlang) {
  double b = 1.0;
  for (int n = 1; n <= servers; ++n) {
    b = offered_erlang * b / (n + offered_erlang * b);
  }
  return b;
}

// Brute-force first-fit: lowest index in [0, channel_count) absent from the
// union of the touched segments' occupancy sets; -1 when none exists.
inline int brute_force_first_fit(const SpectrumState& state,
                                 const std::set<int>& touched,
                                 int channel_count) {
  std::set<int> busy;
  for (int seg : touched) {
    auto it = state.occupied.find(seg);
    if (it != state.occupied.end()) {
      busy.insert(it->second.begin(), it->second.end());
    }
  }
  for (int idx = 0; idx < channel_count; ++idx) {
    if (!busy.count(idx)) {
      return idx;
    }
  }
  return -1;
}

// Exhaustive placement enumeration. Walks every assignment of VNFs to
// candidate nodes in lexicographic order, applies every constraint
// directly and returns the minimum objective.
struct EnumerationResult {
  bool feasible = false;
  double cost = std::numeric_limits<double>::infinity();
  std::map<std::string, std::string> assignment;
};

inline EnumerationResult enumerate_placements(
    const Nsd& nsd, const Topology& topo, const std::vector<VimState>& vims,
    const LatencyParams& latency) {
  EnumerationResult best;
  std::vector<std::string> nodes;
  std::map<std::string, const VimState*> vim_of;
  for (const VimState& v : vims) {
    nodes.push_back(v.node);
    vim_of[v.node] = &v;
  }
  std::sort(nodes.begin(), nodes.end());
  if (nodes.empty() || nsd.vnfs.empty()) {
    best.feasible = nsd.vnfs.empty();
    best.cost = 0.0;
    return best;
  }

  // Latency of the unordered node pair; walking from the smaller id keeps
  // the span sum order identical no matter which way a link points.
  auto pair_latency = [&](const std::string& a,
                          const std::string& b) -> double {
    if (a == b) {
      return 0.0;
    }
    try {
      OpticalPath p = route_path(topo, std::min(a, b), std::max(a, b));
      return compute_latency(topo, p.hops, latency, {});
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  auto endpoint_node =
      [&](const std::string& end,
          const std::vector<std::size_t>& choice) -> std::string {
    const std::string prefix = kCameraSourcePrefix;
    if (end.rfind(prefix, 0) == 0) {
      return end.substr(prefix.size());
    }
    for (std::size_t i = 0; i < nsd.vnfs.size(); ++i) {
      if (nsd.vnfs[i].name == end) {
        return nodes[choice[i]];
      }
    }
    return {};
  };

  std::vector<std::size_t> choice(nsd.vnfs.size(), 0);
  while (true) {
    // Constraints.
    bool ok = true;
    std::map<std::string, std::array<double, 3>> used;
    for (std::size_t i = 0; ok && i < nsd.vnfs.size(); ++i) {
      const VnfDescriptor& d = nsd.vnfs[i];
      const std::string& node = nodes[choice[i]];
      if (d.pin_node && *d.pin_node != node) {
        ok = false;
        break;
      }
      if (!d.allowed_tiers.count(topo.node(node).dc->tier)) {
        ok = false;
        break;
      }
      auto& u = used[node];
      u[0] += d.cpu_cores;
      u[1] += d.ram_gb;
      u[2] += d.storage_tb;
    }
    if (ok) {
      for (const auto& [node, u] : used) {
        const VimState& vim = *vim_of.at(node);
        if (u[0] > vim.free_cpu || u[1] > vim.free_ram ||
            u[2] > vim.free_storage_tb + 1e-12) {
          ok = false;
          break;
        }
      }
    }
    double cost = 0.0;
    if (ok) {
      for (const VirtualLink& l : nsd.links) {
        std::string na = endpoint_node(l.from_vnf, choice);
        std::string nb = endpoint_node(l.to_vnf, choice);
        double ms = pair_latency(na, nb);
        if (std::isinf(ms) || (l.max_latency_ms && ms > *l.max_latency_ms)) {
          ok = false;
          break;
        }
        cost += l.bandwidth_gbps * ms;
      }
    }
    if (ok && (!best.feasible || cost < best.cost)) {
      best.feasible = true;
      best.cost = cost;
      best.assignment.clear();
      for (std::size_t i = 0; i < nsd.vnfs.size(); ++i) {
        best.assignment[nsd.vnfs[i].name] = nodes[choice[i]];
      }
    }
    // Next assignment vector.
    std::size_t pos = choice.size();
    while (pos > 0) {
      --pos;
      if (++choice[pos] < nodes.size()) {
        break;
      }
      choice[pos] = 0;
      if (pos == 0) {
        return best;
      }
    }
  }
}

}  // namespace metrosim::testing
