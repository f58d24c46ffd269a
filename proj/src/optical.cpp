#include "metrosim/optical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace metrosim {

const ModulationFormat& OpticalConfig::format(FormatName name) const {
  for (const ModulationFormat& f : formats) {
    if (f.name == name) {
      return f;
    }
  }
  fail(ErrorCode::InvalidParams,
       std::string("format table has no entry for ") + format_name_str(name));
}

OpticalConfig OpticalConfig::from_json(const json& j) {
  const std::string context = "optical_config";
  check_fields(j, context,
               {"splitter_insertion_db", "wb_insertion_db", "edfa_nf_db",
                "soa_nf_db", "formats"});
  OpticalConfig c;
  if (auto v = opt_number(j, context, "splitter_insertion_db")) {
    c.splitter_insertion_db = *v;
  }
  if (auto v = opt_number(j, context, "wb_insertion_db")) {
    c.wb_insertion_db = *v;
  }
  if (auto v = opt_number(j, context, "edfa_nf_db")) c.edfa_nf_db = *v;
  if (auto v = opt_number(j, context, "soa_nf_db")) c.soa_nf_db = *v;
  if (j.contains("formats")) {
    const json& fs = j.at("formats");
    if (!fs.is_array() || fs.size() != 3) {
      fail(ErrorCode::ParseError,
           context + ": 'formats' must list the three formats");
    }
    for (std::size_t i = 0; i < 3; ++i) {
      const json& fj = fs[i];
      const std::string fc = context + ".formats[]";
      check_fields(fj, fc,
                   {"name", "baud_gbaud", "net_rate_gbps", "required_osnr_db"});
      ModulationFormat f;
      f.name = parse_format_name(get_string(fj, fc, "name"));
      f.baud_gbaud = get_number(fj, fc, "baud_gbaud");
      f.net_rate_gbps = get_number(fj, fc, "net_rate_gbps");
      f.required_osnr_db = get_number(fj, fc, "required_osnr_db");
      c.formats[i] = f;
    }
    // Rates and OSNR thresholds must be ordered QPSK < 16QAM < 64QAM.
    for (std::size_t i = 0; i + 1 < 3; ++i) {
      if (c.formats[i].net_rate_gbps >= c.formats[i + 1].net_rate_gbps ||
          c.formats[i].required_osnr_db >= c.formats[i + 1].required_osnr_db) {
        fail(ErrorCode::InvalidParams,
             context + ": format rates and OSNR thresholds must be increasing");
      }
    }
  }
  return c;
}

json OpticalConfig::to_json() const {
  json fs = json::array();
  for (const ModulationFormat& f : formats) {
    fs.push_back({{"name", format_name_str(f.name)},
                  {"baud_gbaud", f.baud_gbaud},
                  {"net_rate_gbps", f.net_rate_gbps},
                  {"required_osnr_db", f.required_osnr_db}});
  }
  return json{{"splitter_insertion_db", splitter_insertion_db},
              {"wb_insertion_db", wb_insertion_db},
              {"edfa_nf_db", edfa_nf_db},
              {"soa_nf_db", soa_nf_db},
              {"formats", fs}};
}

OpticalPath route_path(const Topology& topo, const std::string& src,
                       const std::string& dst) {
  const Node& a = topo.node(src);
  const Node& z = topo.node(dst);
  if (a.id == z.id) {
    fail(ErrorCode::SameEndpoint, "source and destination are both '" + src + "'");
  }
  int pa = topo.path_position(a.id);
  int pz = topo.path_position(z.id);
  int step = pa < pz ? 1 : -1;

  OpticalPath path;
  path.hops.push_back(a.id);
  for (int p = pa; p != pz; p += step) {
    // Span between path positions p and p+step.
    int span_pos = step > 0 ? p : p - 1;
    const FiberSpan& s =
        topo.span(topo.ordered_span_ids[static_cast<std::size_t>(span_pos)]);
    if (!s.operational) {
      fail(ErrorCode::NoPath,
           "span '" + s.id + "' is out of service and the horseshoe has no detour");
    }
    path.span_ids.push_back(s.id);
    path.total_length_km += s.length_km;
    path.hops.push_back(topo.path_order[static_cast<std::size_t>(p + step)]);
  }
  return path;
}

namespace {

double node_insertion_db(const Node& n, const OpticalConfig& cfg) {
  if (n.amp_variant == AmpVariant::SoaLossless) {
    return 0.0;  // gain-integrated cross-connect, no net loss
  }
  double loss = cfg.splitter_insertion_db;
  if (n.has_blocker) {
    loss += cfg.wb_insertion_db;
  }
  return loss;
}

double node_nf_db(const Node& n, const OpticalConfig& cfg) {
  return n.amp_variant == AmpVariant::SoaLossless ? cfg.soa_nf_db
                                                  : cfg.edfa_nf_db;
}

}  // namespace

FeasibilityReport evaluate_feasibility(const Topology& topo,
                                       const OpticalPath& path,
                                       const ModulationFormat& format,
                                       double launch_power_dbm,
                                       const OpticalConfig& config) {
  FeasibilityReport report;
  report.required_osnr_db = format.required_osnr_db;

  if (path.span_ids.empty()) {
    // Add/drop at one node: no impairment accumulated.
    report.osnr_db = std::numeric_limits<double>::infinity();
    report.feasible = true;
    return report;
  }

  // One amplified stage per span, closed at the downstream node, which
  // restores power to the launch level.
  double inv_osnr_sum = 0.0;
  for (std::size_t i = 0; i < path.span_ids.size(); ++i) {
    const FiberSpan& s = topo.span(path.span_ids[i]);
    const Node& downstream = topo.node(path.hops[i + 1]);
    double stage_loss = s.loss_db() + node_insertion_db(downstream, config);
    double stage_osnr_db =
        58.0 + (launch_power_dbm - stage_loss) - node_nf_db(downstream, config);
    report.total_loss_db += stage_loss;
    inv_osnr_sum += std::pow(10.0, -stage_osnr_db / 10.0);
  }
  report.osnr_db = -10.0 * std::log10(inv_osnr_sum);
  report.feasible = report.osnr_db >= report.required_osnr_db;
  return report;
}

std::set<int> segments_touched(const Topology& topo, const OpticalPath& path) {
  std::set<int> touched;
  for (const std::string& span_id : path.span_ids) {
    touched.insert(topo.segment_of_span(span_id));
  }
  return touched;
}

int assign_channel(const SpectrumState& state, const std::set<int>& touched,
                   int channel_count) {
  for (int idx = 0; idx < channel_count; ++idx) {
    bool free = true;
    for (int seg : touched) {
      auto it = state.occupied.find(seg);
      if (it != state.occupied.end() && it->second.count(idx)) {
        free = false;
        break;
      }
    }
    if (free) {
      return idx;
    }
  }
  fail(ErrorCode::OpticalBlocked,
       "no channel index free on all touched segments");
}

std::vector<BlockerRule> configure_blockers(const Topology& topo,
                                            const OpticalPath& path,
                                            int channel_index) {
  std::vector<BlockerRule> rules;
  // PASS at every blocker-equipped interior hop.
  for (std::size_t i = 1; i + 1 < path.hops.size(); ++i) {
    const Node& n = topo.node(path.hops[i]);
    if (n.has_blocker) {
      rules.push_back({n.id, channel_index, BlockerAction::Pass});
    }
  }
  // BLOCK at the first blocker-equipped node beyond each endpoint, walking
  // outward along the horseshoe.
  auto block_beyond = [&](const std::string& endpoint,
                          const std::string& towards) {
    int pos = topo.path_position(endpoint);
    int inner = topo.path_position(towards);
    int step = pos > inner ? 1 : -1;  // away from the path
    for (int p = pos + step;
         p >= 0 && p < static_cast<int>(topo.path_order.size()); p += step) {
      const Node& n = topo.node(topo.path_order[static_cast<std::size_t>(p)]);
      if (n.has_blocker) {
        rules.push_back({n.id, channel_index, BlockerAction::Block});
        return;
      }
    }
  };
  if (path.hops.size() >= 2) {
    block_beyond(path.hops.front(), path.hops[1]);
    block_beyond(path.hops.back(), path.hops[path.hops.size() - 2]);
  }
  return rules;
}

bool node_supports_format(const Node& node, FormatName format) {
  return std::any_of(node.transponders.begin(), node.transponders.end(),
                     [&](const TransponderType& t) { return t.supports(format); });
}

const MediaChannel& OpticalNetwork::provision(const Topology& topo,
                                              const std::string& src,
                                              const std::string& dst,
                                              FormatName format,
                                              double launch_power_dbm) {
  if (!node_supports_format(topo.node(src), format) ||
      !node_supports_format(topo.node(dst), format)) {
    fail(ErrorCode::UnsupportedFormat,
         std::string("no transponder at '") + src + "'/'" + dst +
             "' supports " + format_name_str(format));
  }
  OpticalPath path = route_path(topo, src, dst);
  FeasibilityReport report = evaluate_feasibility(
      topo, path, config_.format(format), launch_power_dbm, config_);
  if (!report.feasible) {
    fail(ErrorCode::InfeasibleOsnr,
         std::string(format_name_str(format)) + " needs " +
             std::to_string(report.required_osnr_db) + " dB OSNR, path yields " +
             std::to_string(report.osnr_db) + " dB",
         json{{"total_loss_db", report.total_loss_db},
              {"osnr_db", report.osnr_db},
              {"required_osnr_db", report.required_osnr_db}});
  }
  std::set<int> touched = segments_touched(topo, path);
  int index = assign_channel(spectrum_, touched, topo.grid.channel_count);

  // All checks passed; mutate.
  MediaChannel ch;
  std::ostringstream id;
  id << "mc-" << std::setw(6) << std::setfill('0') << next_seq_++;
  ch.id = id.str();
  ch.path = std::move(path);
  ch.channel_index = index;
  ch.format = format;
  ch.launch_power_dbm = launch_power_dbm;
  ch.state = ChannelState::Active;
  ch.report = report;
  ch.blocker_rules = configure_blockers(topo, ch.path, index);
  for (int seg : touched) {
    spectrum_.occupied[seg].insert(index);
  }
  auto [it, inserted] = channels_.emplace(ch.id, std::move(ch));
  return it->second;
}

MediaChannel OpticalNetwork::release(const Topology& topo,
                                     const std::string& id) {
  auto it = channels_.find(id);
  if (it == channels_.end()) {
    fail(ErrorCode::UnknownChannel, "unknown media channel '" + id + "'");
  }
  MediaChannel& ch = it->second;
  if (ch.state == ChannelState::Released) {
    fail(ErrorCode::AlreadyReleased,
         "media channel '" + id + "' is already released");
  }
  for (int seg : segments_touched(topo, ch.path)) {
    auto occ = spectrum_.occupied.find(seg);
    occ->second.erase(ch.channel_index);
    if (occ->second.empty()) {
      spectrum_.occupied.erase(occ);
    }
  }
  ch.state = ChannelState::Released;
  ch.blocker_rules.clear();
  return ch;
}

const MediaChannel& OpticalNetwork::channel(const std::string& id) const {
  auto it = channels_.find(id);
  if (it == channels_.end()) {
    fail(ErrorCode::UnknownChannel, "unknown media channel '" + id + "'");
  }
  return it->second;
}

std::size_t OpticalNetwork::occupied_slot_count() const {
  std::size_t n = 0;
  for (const auto& [seg, indices] : spectrum_.occupied) {
    n += indices.size();
  }
  return n;
}

namespace {

json report_to_json(const FeasibilityReport& r) {
  json j{{"total_loss_db", r.total_loss_db},
         {"required_osnr_db", r.required_osnr_db},
         {"feasible", r.feasible}};
  if (std::isinf(r.osnr_db)) {
    j["osnr_db"] = "inf";
  } else {
    j["osnr_db"] = r.osnr_db;
  }
  return j;
}

FeasibilityReport report_from_json(const json& j) {
  FeasibilityReport r;
  r.total_loss_db = j.at("total_loss_db").get<double>();
  r.required_osnr_db = j.at("required_osnr_db").get<double>();
  r.feasible = j.at("feasible").get<bool>();
  const json& osnr = j.at("osnr_db");
  r.osnr_db = osnr.is_string() ? std::numeric_limits<double>::infinity()
                               : osnr.get<double>();
  return r;
}

json channel_to_json(const MediaChannel& ch) {
  json rules = json::array();
  for (const BlockerRule& r : ch.blocker_rules) {
    rules.push_back({{"node", r.node},
                     {"channel_index", r.channel_index},
                     {"action", r.action == BlockerAction::Pass ? "PASS" : "BLOCK"}});
  }
  return json{{"id", ch.id},
              {"path",
               {{"hops", ch.path.hops},
                {"span_ids", ch.path.span_ids},
                {"total_length_km", ch.path.total_length_km}}},
              {"channel_index", ch.channel_index},
              {"format", format_name_str(ch.format)},
              {"launch_power_dbm", ch.launch_power_dbm},
              {"state", ch.state == ChannelState::Active ? "ACTIVE" : "RELEASED"},
              {"report", report_to_json(ch.report)},
              {"blocker_rules", rules}};
}

MediaChannel channel_from_json(const json& j) {
  MediaChannel ch;
  ch.id = j.at("id").get<std::string>();
  const json& p = j.at("path");
  ch.path.hops = p.at("hops").get<std::vector<std::string>>();
  ch.path.span_ids = p.at("span_ids").get<std::vector<std::string>>();
  ch.path.total_length_km = p.at("total_length_km").get<double>();
  ch.channel_index = j.at("channel_index").get<int>();
  ch.format = parse_format_name(j.at("format").get<std::string>());
  ch.launch_power_dbm = j.at("launch_power_dbm").get<double>();
  ch.state = j.at("state").get<std::string>() == "ACTIVE"
                 ? ChannelState::Active
                 : ChannelState::Released;
  ch.report = report_from_json(j.at("report"));
  for (const json& rj : j.at("blocker_rules")) {
    BlockerRule r;
    r.node = rj.at("node").get<std::string>();
    r.channel_index = rj.at("channel_index").get<int>();
    r.action = rj.at("action").get<std::string>() == "PASS"
                   ? BlockerAction::Pass
                   : BlockerAction::Block;
    ch.blocker_rules.push_back(std::move(r));
  }
  return ch;
}

}  // namespace

json OpticalNetwork::to_json() const {
  json occ = json::object();
  for (const auto& [seg, indices] : spectrum_.occupied) {
    occ[std::to_string(seg)] = indices;
  }
  json chans = json::object();
  for (const auto& [id, ch] : channels_) {
    chans[id] = channel_to_json(ch);
  }
  return json{{"config", config_.to_json()},
              {"occupancy", occ},
              {"channels", chans},
              {"next_seq", next_seq_}};
}

OpticalNetwork OpticalNetwork::from_json(const json& j) {
  OpticalNetwork net(OpticalConfig::from_json(j.at("config")));
  for (const auto& [seg, indices] : j.at("occupancy").items()) {
    net.spectrum_.occupied[std::stoi(seg)] =
        indices.get<std::set<int>>();
  }
  for (const auto& [id, cj] : j.at("channels").items()) {
    net.channels_[id] = channel_from_json(cj);
  }
  net.next_seq_ = j.at("next_seq").get<std::uint64_t>();
  return net;
}

}  // namespace metrosim
