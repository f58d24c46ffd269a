#include "metrosim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <queue>
#include <sstream>

#include "metrosim/rng.hpp"

namespace metrosim {

const char* camera_kind_name(CameraKind k) {
  switch (k) {
    case CameraKind::Fix: return "FIX";
    case CameraKind::Thermal: return "THERMAL";
    case CameraKind::Ptz: return "PTZ";
  }
  return "?";
}

const char* flow_kind_name(FlowKind k) {
  switch (k) {
    case FlowKind::LiveVideo: return "LIVE_VIDEO";
    case FlowKind::Archive: return "ARCHIVE";
    case FlowKind::PtzControl: return "PTZ_CONTROL";
    case FlowKind::AnalyticsFeed: return "ANALYTICS_FEED";
  }
  return "?";
}

Scenario generate_scenario(const Topology& topo, const ScenarioParams& params) {
  if (params.cameras_per_amen < 0) {
    fail(ErrorCode::InvalidParams, "cameras_per_amen must be >= 0");
  }
  if (params.ptz_fraction < 0.0 || params.ptz_fraction > 1.0) {
    fail(ErrorCode::InvalidParams, "ptz_fraction must be in [0, 1]");
  }
  if (params.stream_mbps <= 0.0) {
    fail(ErrorCode::InvalidParams, "stream_mbps must be > 0");
  }

  Scenario scenario;
  scenario.seed = params.seed;
  if (params.cameras_per_amen < 100 || params.cameras_per_amen > 250) {
    scenario.warnings.push_back(
        "cameras_per_amen " + std::to_string(params.cameras_per_amen) +
        " outside the typical 100-250 per-server range");
  }

  // Control-centre anchor: the first MCEN along the horseshoe.
  const std::string& control_node = topo.path_order.front();

  std::uint64_t amen_index = 0;
  for (const std::string& node_id : topo.path_order) {
    const Node& n = topo.node(node_id);
    if (n.kind != NodeKind::Amen) {
      continue;
    }
    int count = params.cameras_per_amen;
    if (count == 0) {
      ++amen_index;
      continue;
    }

    // PTZ slots are shuffled per AMEN; the remainder alternates fixed and
    // thermal units.
    int ptz_count = static_cast<int>(
        std::floor(params.ptz_fraction * count + 0.5));
    std::vector<int> slots(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      slots[static_cast<std::size_t>(i)] = i;
    }
    RandomStream shuffle_rng(params.seed, amen_index);
    for (std::size_t i = slots.size(); i > 1; --i) {
      std::swap(slots[i - 1], slots[shuffle_rng.pick(i)]);
    }
    std::vector<CameraKind> kinds(static_cast<std::size_t>(count),
                                  CameraKind::Fix);
    for (int i = 0; i < ptz_count; ++i) {
      kinds[static_cast<std::size_t>(slots[static_cast<std::size_t>(i)])] =
          CameraKind::Ptz;
    }
    int regular = 0;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      if (kinds[i] == CameraKind::Ptz) {
        continue;
      }
      kinds[i] = (regular % 3 == 2) ? CameraKind::Thermal : CameraKind::Fix;
      ++regular;
    }

    for (int i = 0; i < count; ++i) {
      Camera cam;
      std::ostringstream id;
      id << "cam-" << node_id << '-' << std::setw(4) << std::setfill('0') << i;
      cam.id = id.str();
      cam.kind = kinds[static_cast<std::size_t>(i)];
      cam.attached_node = node_id;
      cam.stream_mbps = params.stream_mbps;
      scenario.cameras.push_back(std::move(cam));
    }

    double aggregate = count * params.stream_mbps;
    scenario.flows.push_back({"flow-" + node_id + "-live",
                              FlowKind::LiveVideo, node_id, "CSS", aggregate,
                              std::nullopt});
    scenario.flows.push_back({"flow-" + node_id + "-analytics",
                              FlowKind::AnalyticsFeed, node_id, "ANALYTICS",
                              aggregate, std::nullopt});
    scenario.flows.push_back({"flow-" + node_id + "-archive",
                              FlowKind::Archive, node_id, control_node, 8.0,
                              std::nullopt});
    if (ptz_count > 0) {
      scenario.flows.push_back({"flow-" + node_id + "-ptz",
                                FlowKind::PtzControl, control_node, node_id,
                                0.1 * ptz_count, 20.0});
    }
    ++amen_index;
  }
  return scenario;
}

json Scenario::to_json() const {
  json cams = json::array();
  for (const Camera& c : cameras) {
    cams.push_back({{"id", c.id},
                    {"kind", camera_kind_name(c.kind)},
                    {"attached_node", c.attached_node},
                    {"stream_mbps", c.stream_mbps}});
  }
  json fls = json::array();
  for (const Flow& f : flows) {
    json fj{{"id", f.id},
            {"kind", flow_kind_name(f.kind)},
            {"src", f.src},
            {"dst", f.dst},
            {"bandwidth_mbps", f.bandwidth_mbps}};
    if (f.max_latency_ms) {
      fj["max_latency_ms"] = *f.max_latency_ms;
    }
    fls.push_back(std::move(fj));
  }
  return json{{"seed", seed},
              {"cameras", cams},
              {"flows", fls},
              {"warnings", warnings}};
}

json Metrics::to_json() const {
  json hist = json::array();
  for (const HistogramBucket& b : histogram) {
    hist.push_back({{"bucket_ms_low", b.low_ms},
                    {"bucket_ms_high", b.high_ms},
                    {"count", b.count}});
  }
  return json{{"blocking_probability", blocking_probability},
              {"offered_load_erlang", offered_load_erlang},
              {"arrivals", arrivals},
              {"accepted", accepted},
              {"blocked", blocked},
              {"spectrum_utilization", spectrum_utilization},
              {"latency_ms",
               {{"mean", latency.mean_ms},
                {"p50", latency.p50_ms},
                {"p95", latency.p95_ms},
                {"p99", latency.p99_ms}}},
              {"latency_histogram", hist},
              {"failure_breakdown", failure_breakdown}};
}

std::string Metrics::histogram_csv() const {
  std::ostringstream out;
  out << "bucket_ms_low,bucket_ms_high,count\n";
  out << std::fixed << std::setprecision(1);
  for (const HistogramBucket& b : histogram) {
    out << b.low_ms << ',' << b.high_ms << ',' << b.count << '\n';
  }
  return out.str();
}

namespace {

constexpr double kBucketMs = 0.1;

struct Departure {
  double time = 0.0;
  std::uint64_t order = 0;
  std::string service_id;

  bool operator>(const Departure& other) const {
    if (time != other.time) return time > other.time;
    return order > other.order;
  }
};

}  // namespace

Metrics run_experiment(const Topology& topo, const ExperimentParams& params) {
  if (params.arrival_rate_per_s <= 0.0 || params.mean_hold_s <= 0.0) {
    fail(ErrorCode::InvalidParams, "arrival and holding rates must be > 0");
  }
  if (params.max_requests == 0) {
    fail(ErrorCode::InvalidParams, "max_requests must be > 0");
  }
  for (const auto& [fmt, weight] : params.demand_distribution) {
    if (weight < 0.0) {
      fail(ErrorCode::InvalidParams, "demand weights must be >= 0");
    }
  }

  OpticalNetwork optical(params.optical);
  Com com(topo);

  // Endpoint universe: every SIP pair whose nodes differ.
  const auto& sips = com.domain().sips;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < sips.size(); ++i) {
    for (std::size_t k = i + 1; k < sips.size(); ++k) {
      if (sips[i].node != sips[k].node) {
        pairs.emplace_back(i, k);
      }
    }
  }
  if (pairs.empty()) {
    fail(ErrorCode::InvalidParams,
         "topology exposes no SIP pair with distinct nodes");
  }

  double demand_total = 0.0;
  for (const auto& [fmt, weight] : params.demand_distribution) {
    demand_total += weight;
  }

  RandomStream arrivals_rng(params.seed, 0);
  RandomStream holds_rng(params.seed, 1);
  RandomStream endpoints_rng(params.seed, 2);
  RandomStream demand_rng(params.seed, 3);

  std::priority_queue<Departure, std::vector<Departure>, std::greater<>> queue;
  Metrics m;
  m.offered_load_erlang = params.arrival_rate_per_s * params.mean_hold_s;
  m.arrivals = params.max_requests;

  const double total_slots =
      static_cast<double>(topo.grid.channel_count) *
      static_cast<double>(topo.segments.size());
  double now = 0.0;
  double occupancy_integral = 0.0;
  std::vector<double> latencies;
  latencies.reserve(params.max_requests);
  std::uint64_t order = 0;

  auto advance_to = [&](double t) {
    occupancy_integral +=
        (t - now) * static_cast<double>(optical.occupied_slot_count());
    now = t;
  };

  for (std::uint64_t req = 0; req < params.max_requests; ++req) {
    double t_arrival =
        now + arrivals_rng.exponential(1.0 / params.arrival_rate_per_s);
    double hold = holds_rng.exponential(params.mean_hold_s);

    while (!queue.empty() && queue.top().time <= t_arrival) {
      Departure dep = queue.top();
      queue.pop();
      advance_to(dep.time);
      com.remove(topo, optical, dep.service_id);
    }
    advance_to(t_arrival);

    const auto& [ia, iz] = pairs[endpoints_rng.pick(pairs.size())];
    CreateRequest request;
    request.sip_a = sips[ia].id;
    request.sip_z = sips[iz].id;
    request.layer = ServiceLayer::Optical;
    request.launch_power_dbm = params.launch_power_dbm;
    if (demand_total > 0.0) {
      double draw = demand_rng.uniform(0.0, demand_total);
      double acc = 0.0;
      for (std::size_t i = 0; i < params.demand_distribution.size(); ++i) {
        acc += params.demand_distribution[i].second;
        if (draw < acc || i + 1 == params.demand_distribution.size()) {
          request.format_hint = params.demand_distribution[i].first;
          break;
        }
      }
    }

    try {
      const ConnectivityService& svc = com.create(topo, optical, request);
      const MediaChannel& ch = optical.channel(*svc.underlying);
      latencies.push_back(
          compute_latency(topo, ch.path.hops, params.latency, {}));
      queue.push({t_arrival + hold, order++, svc.id});
      ++m.accepted;
    } catch (const DomainError& e) {
      ++m.blocked;
      ++m.failure_breakdown[error_code_name(e.code())];
    }
  }

  m.blocking_probability =
      static_cast<double>(m.blocked) / static_cast<double>(m.arrivals);
  if (now > 0.0 && total_slots > 0.0) {
    m.spectrum_utilization = occupancy_integral / (now * total_slots);
  }

  if (!latencies.empty()) {
    std::vector<double> sorted = latencies;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double v : sorted) {
      sum += v;
    }
    m.latency.mean_ms = sum / static_cast<double>(sorted.size());
    auto rank = [&](double q) {
      std::size_t idx = static_cast<std::size_t>(
          std::ceil(q * static_cast<double>(sorted.size())));
      return sorted[std::min(sorted.size() - 1, idx == 0 ? 0 : idx - 1)];
    };
    m.latency.p50_ms = rank(0.50);
    m.latency.p95_ms = rank(0.95);
    m.latency.p99_ms = rank(0.99);

    std::map<long long, std::uint64_t> buckets;
    for (double v : latencies) {
      ++buckets[static_cast<long long>(std::floor(v / kBucketMs))];
    }
    for (const auto& [idx, count] : buckets) {
      m.histogram.push_back({static_cast<double>(idx) * kBucketMs,
                             static_cast<double>(idx + 1) * kBucketMs, count});
    }
  }
  return m;
}

}  // namespace metrosim
