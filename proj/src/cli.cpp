#include "metrosim/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "metrosim/sim_state.hpp"

namespace metrosim {

namespace {

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    fail(ErrorCode::InvalidParams, "cannot write file: " + path);
  }
  out << content;
}

// RunReport envelope on stdout; the result payload alone goes to --out so
// reruns can be compared byte for byte without the timestamp.
void emit(std::ostream& out, const std::string& command,
          std::optional<std::uint64_t> seed, const json& result,
          const std::vector<std::string>& warnings,
          const std::string& out_path) {
  json report{{"command", command},
              {"timestamp", utc_timestamp()},
              {"warnings", warnings},
              {"result", result},
              {"exit_code", 0}};
  if (seed) {
    report["seed"] = *seed;
  }
  out << report.dump(2) << '\n';
  if (!out_path.empty()) {
    write_file(out_path, result.dump(2) + "\n");
  }
}

SimState load_state(const std::string& state_path,
                    const std::string& topology_path) {
  std::ifstream probe(state_path);
  if (probe.good()) {
    if (!topology_path.empty()) {
      fail(ErrorCode::InvalidParams,
           "--topology is only for creating a new state file; '" + state_path +
               "' already exists");
    }
    return SimState::from_json(load_json_file(state_path));
  }
  if (topology_path.empty()) {
    fail(ErrorCode::InvalidParams,
         "state file '" + state_path +
             "' does not exist; pass --topology to create it");
  }
  return SimState::from_topology_doc(load_json_file(topology_path));
}

void save_state(const SimState& state, const std::string& path) {
  write_file(path, state.to_json().dump(2) + "\n");
}

ServiceLayer parse_layer_flag(const std::string& s) {
  if (s == "optical") return ServiceLayer::Optical;
  if (s == "l2") return ServiceLayer::L2;
  if (s == "l3") return ServiceLayer::L3;
  fail(ErrorCode::InvalidParams,
       "layer must be one of optical, l2, l3 (got '" + s + "')");
}

std::vector<std::pair<FormatName, double>> parse_demand_flag(
    const std::string& s) {
  std::vector<std::pair<FormatName, double>> mix;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto colon = item.rfind(':');
    if (colon == std::string::npos) {
      fail(ErrorCode::InvalidParams,
           "demand entries look like FORMAT:WEIGHT (got '" + item + "')");
    }
    FormatName fmt = parse_format_name(item.substr(0, colon));
    double weight = std::stod(item.substr(colon + 1));
    mix.emplace_back(fmt, weight);
  }
  return mix;
}

json domain_summary(const SimState& state) {
  int dcs = 0;
  for (const Node& n : state.topo.nodes) {
    if (n.dc) {
      ++dcs;
    }
  }
  return json{{"nodes", state.topo.nodes.size()},
              {"spans", state.topo.spans.size()},
              {"data_centers", dcs},
              {"segments", state.topo.segments.size()},
              {"sips", state.com.domain().sips.size()},
              {"warnings", state.topology_warnings}};
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"metro horseshoe optical network simulator"};
  app.require_subcommand(1);

  std::string topology_path, state_path, out_path, csv_path;
  std::string sip_a, sip_z, layer_str = "optical", format_str, demand_str;
  std::string service_id, slice_id, nsd_path, metrics_path;
  double bandwidth_gbps = 0.0, launch_dbm = 0.0;
  double arrival_rate = 1.0, mean_hold = 1.0;
  double ptz_fraction = 0.1, stream_mbps = 4.0;
  int cameras_per_amen = 150;
  std::uint64_t seed = 0, max_requests = 10000;

  auto* validate = app.add_subcommand("validate", "check a topology document");
  validate->add_option("--topology", topology_path, "topology JSON file")
      ->required();
  validate->add_option("--out", out_path, "write the result payload here");

  auto* provision =
      app.add_subcommand("provision", "create a connectivity service");
  provision->add_option("--state", state_path, "state JSON file")->required();
  provision->add_option("--topology", topology_path,
                        "topology document, bootstraps a new state file");
  provision->add_option("--layer", layer_str, "optical | l2 | l3");
  provision->add_option("--a", sip_a, "SIP id of one endpoint")->required();
  provision->add_option("--z", sip_z, "SIP id of the other endpoint")
      ->required();
  provision->add_option("--bandwidth-gbps", bandwidth_gbps,
                        "bandwidth for l2/l3 services");
  provision->add_option("--format", format_str,
                        "modulation format hint, e.g. DP-16QAM");
  provision->add_option("--launch-power-dbm", launch_dbm, "launch power");
  provision->add_option("--out", out_path, "write the result payload here");

  auto* del = app.add_subcommand("delete", "delete a connectivity service");
  del->add_option("--state", state_path, "state JSON file")->required();
  del->add_option("--service", service_id, "service id")->required();
  del->add_option("--out", out_path, "write the result payload here");

  auto* slice = app.add_subcommand("slice", "manage network slices");
  slice->require_subcommand(1);
  auto* slice_create = slice->add_subcommand("create", "instantiate a slice");
  slice_create->add_option("--state", state_path, "state JSON file")
      ->required();
  slice_create->add_option("--topology", topology_path,
                           "topology document, bootstraps a new state file");
  slice_create->add_option("--id", slice_id, "slice id")->required();
  slice_create->add_option("--nsd", nsd_path, "network service descriptor")
      ->required();
  slice_create->add_option("--out", out_path, "write the result payload here");
  auto* slice_delete = slice->add_subcommand("delete", "tear a slice down");
  slice_delete->add_option("--state", state_path, "state JSON file")
      ->required();
  slice_delete->add_option("--id", slice_id, "slice id")->required();
  slice_delete->add_option("--out", out_path, "write the result payload here");
  auto* slice_show = slice->add_subcommand("show", "show a slice");
  slice_show->add_option("--state", state_path, "state JSON file")->required();
  slice_show->add_option("--id", slice_id, "slice id")->required();
  slice_show->add_option("--out", out_path, "write the result payload here");

  auto* scenario =
      app.add_subcommand("scenario", "generate a surveillance workload");
  scenario->add_option("--topology", topology_path, "topology JSON file")
      ->required();
  scenario->add_option("--cameras-per-amen", cameras_per_amen,
                       "cameras attached to each AMEN");
  scenario->add_option("--ptz-fraction", ptz_fraction, "fraction of PTZ units");
  scenario->add_option("--stream-mbps", stream_mbps, "per-camera stream rate");
  scenario->add_option("--seed", seed, "random seed")->required();
  scenario->add_option("--out", out_path, "write the result payload here");

  auto* experiment =
      app.add_subcommand("experiment", "run a provisioning load study");
  experiment->add_option("--topology", topology_path, "topology JSON file")
      ->required();
  experiment->add_option("--arrival-rate", arrival_rate,
                         "requests per second");
  experiment->add_option("--mean-hold", mean_hold, "mean holding time, s");
  experiment->add_option("--requests", max_requests, "number of arrivals");
  experiment->add_option("--seed", seed, "random seed")->required();
  experiment->add_option("--demand", demand_str,
                         "format mix, e.g. DP-QPSK:1,DP-16QAM:2");
  experiment->add_option("--launch-power-dbm", launch_dbm, "launch power");
  experiment->add_option("--csv-out", csv_path, "latency histogram CSV");
  experiment->add_option("--out", out_path, "write the result payload here");

  auto* report = app.add_subcommand("report", "emit JSON/CSV reports");
  report->add_option("--metrics", metrics_path,
                     "metrics JSON produced by 'experiment'");
  report->add_option("--state", state_path, "state JSON file");
  report->add_option("--slice", slice_id, "slice id to report on");
  report->add_option("--service", service_id, "service id to report on");
  report->add_option("--csv-out", csv_path, "latency histogram CSV");
  report->add_option("--out", out_path, "write the result payload here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    if (validate->parsed()) {
      SimState state =
          SimState::from_topology_doc(load_json_file(topology_path));
      emit(out, "validate", std::nullopt, domain_summary(state),
           state.topology_warnings, out_path);
      return 0;
    }

    if (provision->parsed()) {
      SimState state = load_state(state_path, topology_path);
      CreateRequest request;
      request.sip_a = sip_a;
      request.sip_z = sip_z;
      request.layer = parse_layer_flag(layer_str);
      request.bandwidth_gbps = bandwidth_gbps;
      request.launch_power_dbm = launch_dbm;
      if (!format_str.empty()) {
        request.format_hint = parse_format_name(format_str);
      }
      const ConnectivityService& svc =
          state.com.create(state.topo, state.optical, request);
      save_state(state, state_path);
      emit(out, "provision", std::nullopt, service_to_json(svc), {}, out_path);
      return 0;
    }

    if (del->parsed()) {
      SimState state = load_state(state_path, "");
      ConnectivityService svc =
          state.com.remove(state.topo, state.optical, service_id);
      save_state(state, state_path);
      emit(out, "delete", std::nullopt, service_to_json(svc), {}, out_path);
      return 0;
    }

    if (slice_create->parsed()) {
      SimState state = load_state(state_path, topology_path);
      Nsd nsd = Nsd::from_json(load_json_file(nsd_path));
      SliceInstance inst = state.orch.instantiate(
          state.topo, state.optical, state.com, slice_id, nsd, LatencyParams{});
      if (inst.state == SliceState::Failed) {
        json error{{"code", inst.failure_cause},
                   {"message", "slice '" + slice_id + "' failed to instantiate"},
                   {"details", slice_to_json(inst)}};
        err << error.dump(2) << '\n';
        return 1;
      }
      save_state(state, state_path);
      emit(out, "slice create", std::nullopt, slice_to_json(inst), {},
           out_path);
      return 0;
    }

    if (slice_delete->parsed()) {
      SimState state = load_state(state_path, "");
      SliceInstance inst =
          state.orch.teardown(state.topo, state.optical, state.com, slice_id);
      save_state(state, state_path);
      emit(out, "slice delete", std::nullopt, slice_to_json(inst), {},
           out_path);
      return 0;
    }

    if (slice_show->parsed()) {
      SimState state = load_state(state_path, "");
      emit(out, "slice show", std::nullopt,
           slice_to_json(state.orch.slice(slice_id)), {}, out_path);
      return 0;
    }

    if (scenario->parsed()) {
      SimState state =
          SimState::from_topology_doc(load_json_file(topology_path));
      ScenarioParams params;
      params.cameras_per_amen = cameras_per_amen;
      params.ptz_fraction = ptz_fraction;
      params.stream_mbps = stream_mbps;
      params.seed = seed;
      Scenario s = generate_scenario(state.topo, params);
      emit(out, "scenario", seed, s.to_json(), s.warnings, out_path);
      return 0;
    }

    if (experiment->parsed()) {
      SimState state =
          SimState::from_topology_doc(load_json_file(topology_path));
      ExperimentParams params;
      params.arrival_rate_per_s = arrival_rate;
      params.mean_hold_s = mean_hold;
      params.max_requests = max_requests;
      params.seed = seed;
      params.launch_power_dbm = launch_dbm;
      if (!demand_str.empty()) {
        params.demand_distribution = parse_demand_flag(demand_str);
      }
      Metrics metrics = run_experiment(state.topo, params);
      if (!csv_path.empty()) {
        write_file(csv_path, metrics.histogram_csv());
      }
      emit(out, "experiment", seed, metrics.to_json(), {}, out_path);
      return 0;
    }

    if (report->parsed()) {
      if (!metrics_path.empty()) {
        json metrics = load_json_file(metrics_path);
        if (!csv_path.empty()) {
          std::ostringstream csv;
          csv << "bucket_ms_low,bucket_ms_high,count\n";
          for (const json& b : metrics.at("latency_histogram")) {
            csv << b.at("bucket_ms_low").get<double>() << ','
                << b.at("bucket_ms_high").get<double>() << ','
                << b.at("count").get<std::uint64_t>() << '\n';
          }
          write_file(csv_path, csv.str());
        }
        json summary{
            {"blocking_probability", metrics.at("blocking_probability")},
            {"offered_load_erlang", metrics.at("offered_load_erlang")},
            {"spectrum_utilization", metrics.at("spectrum_utilization")},
            {"latency_ms", metrics.at("latency_ms")}};
        emit(out, "report", std::nullopt, summary, {}, out_path);
        return 0;
      }
      if (state_path.empty()) {
        fail(ErrorCode::InvalidParams,
             "report needs --metrics or --state with --slice/--service");
      }
      SimState state = load_state(state_path, "");
      auto render = [&](const std::string& svc_id) {
        json configs = json::array();
        for (const DeviceConfig& c : state.com.render_device_configs(
                 state.topo, state.optical, svc_id)) {
          configs.push_back(device_config_to_json(c));
        }
        return json{{"service", service_to_json(state.com.get(svc_id))},
                    {"device_configs", configs}};
      };
      if (!slice_id.empty()) {
        const SliceInstance& inst = state.orch.slice(slice_id);
        json services = json::array();
        for (const std::string& svc_id : inst.service_ids) {
          services.push_back(render(svc_id));
        }
        emit(out, "report", std::nullopt,
             json{{"slice", slice_to_json(inst)}, {"services", services}}, {},
             out_path);
        return 0;
      }
      if (!service_id.empty()) {
        emit(out, "report", std::nullopt, render(service_id), {}, out_path);
        return 0;
      }
      fail(ErrorCode::InvalidParams,
           "report needs --metrics or --state with --slice/--service");
    }
  } catch (const DomainError& e) {
    err << e.to_json().dump(2) << '\n';
    return 1;
  }
  return 0;
}

}  // namespace metrosim
