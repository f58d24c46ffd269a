#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "metrosim/control.hpp"
#include "metrosim/latency.hpp"

namespace metrosim {

enum class CameraKind { Fix, Thermal, Ptz };
enum class FlowKind { LiveVideo, Archive, PtzControl, AnalyticsFeed };

const char* camera_kind_name(CameraKind k);
const char* flow_kind_name(FlowKind k);

struct Camera {
  std::string id;
  CameraKind kind = CameraKind::Fix;
  std::string attached_node;  // always an AMEN
  double stream_mbps = 4.0;
};

struct Flow {
  std::string id;
  FlowKind kind = FlowKind::LiveVideo;
  std::string src;  // node id or VNF name
  std::string dst;
  double bandwidth_mbps = 0.0;
  std::optional<double> max_latency_ms;  // always set for PTZ_CONTROL
};

struct ScenarioParams {
  int cameras_per_amen = 150;
  double ptz_fraction = 0.1;
  double stream_mbps = 4.0;
  std::uint64_t seed = 0;
};

struct Scenario {
  std::vector<Camera> cameras;
  std::vector<Flow> flows;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;

  json to_json() const;
};

// Deterministic camera fleet and flow set for the surveillance workload.
// Warns (never errors) when cameras_per_amen falls outside the typical
// 100..250 per-server range.
Scenario generate_scenario(const Topology& topo, const ScenarioParams& params);

struct HistogramBucket {
  double low_ms = 0.0;
  double high_ms = 0.0;
  std::uint64_t count = 0;
};

struct LatencySummary {
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double p99_ms = 0.0;
};

struct Metrics {
  double blocking_probability = 0.0;
  double offered_load_erlang = 0.0;
  std::uint64_t arrivals = 0;
  std::uint64_t accepted = 0;
  std::uint64_t blocked = 0;
  double spectrum_utilization = 0.0;  // time-weighted occupancy fraction
  LatencySummary latency;
  std::vector<HistogramBucket> histogram;  // 0.1 ms buckets
  std::map<std::string, std::uint64_t> failure_breakdown;  // error code -> count

  json to_json() const;
  std::string histogram_csv() const;  // bucket_ms_low,bucket_ms_high,count
};

struct ExperimentParams {
  double arrival_rate_per_s = 1.0;
  double mean_hold_s = 1.0;
  std::uint64_t max_requests = 10000;
  std::uint64_t seed = 0;
  // Requested format mix; empty means auto-select per request.
  std::vector<std::pair<FormatName, double>> demand_distribution;
  double launch_power_dbm = 0.0;
  LatencyParams latency;
  OpticalConfig optical;
};

// Monte-Carlo provisioning study: Poisson arrivals, exponential holding
// times, each request an optical-layer service between a random SIP pair
// through the COM stack. Blocked requests are counted, never retried.
// Deterministic for a fixed seed.
Metrics run_experiment(const Topology& topo, const ExperimentParams& params);

}  // namespace metrosim
