#include "edgeview/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "edgeview/error.hpp"

namespace edgeview::config_io {

namespace {

using scenario::Layout;
using scenario::Point;
using scenario::ScenarioConfig;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::Configuration, what); }

double as_number(const toml::node& n, std::string_view key) {
  if (auto v = n.value<double>()) return *v;
  bad(std::string(key) + " must be a number");
}

std::int64_t as_integer(const toml::node& n, std::string_view key) {
  if (n.is_integer()) return *n.value<std::int64_t>();
  bad(std::string(key) + " must be an integer");
}

std::vector<int> as_int_list(const toml::node& n, std::string_view key) {
  const auto* arr = n.as_array();
  if (arr == nullptr) bad(std::string(key) + " must be an array of integers");
  std::vector<int> out;
  for (const auto& e : *arr) out.push_back(static_cast<int>(as_integer(e, key)));
  return out;
}

Point as_point(const toml::node& n, std::string_view key) {
  const auto* arr = n.as_array();
  if (arr == nullptr || arr->size() != 2) bad(std::string(key) + " must be a [x, y] pair");
  return {as_number(*arr->get(0), key), as_number(*arr->get(1), key)};
}

toml::array point_array(Point p) { return toml::array{p.x, p.y}; }

toml::array int_array(const std::vector<int>& v) {
  toml::array a;
  for (int x : v) a.push_back(x);
  return a;
}

}  // namespace

ScenarioConfig parse_config(std::string_view toml_text) {
  toml::table tbl;
  try {
    tbl = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
    bad(os.str());
  }
  ScenarioConfig c;
  for (const auto& [k, node] : tbl) {
    const std::string_view key = k.str();
    if (key == "L") c.L = static_cast<int>(as_integer(node, key));
    else if (key == "cell_radius_m") c.cell_radius_m = as_number(node, key);
    else if (key == "M") c.M = as_int_list(node, key);
    else if (key == "K") c.K = as_int_list(node, key);
    else if (key == "Ke") c.Ke = as_int_list(node, key);
    else if (key == "scatter_fraction") c.scatter_fraction = as_number(node, key);
    else if (key == "edge_band") {
      const auto* arr = node.as_array();
      if (arr == nullptr || arr->size() != 2) bad("edge_band must be a two-element array");
      c.edge_band = {as_number(*arr->get(0), key), as_number(*arr->get(1), key)};
    }
    else if (key == "tx_power_dBm") c.tx_power_dBm = as_number(node, key);
    else if (key == "carrier_GHz") c.carrier_GHz = as_number(node, key);
    else if (key == "N") c.N = static_cast<int>(as_integer(node, key));
    else if (key == "Np") c.Np = static_cast<int>(as_integer(node, key));
    else if (key == "preamble_len") c.preamble_len = static_cast<int>(as_integer(node, key));
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(as_integer(node, key));
    else if (key == "pathloss_exponent") c.pathloss_exponent = as_number(node, key);
    else if (key == "layout") {
      const auto s = node.value<std::string>();
      if (s == "triple") c.layout = Layout::Triple;
      else if (s == "diamond") c.layout = Layout::Diamond;
      else bad("layout must be \"triple\" or \"diamond\"");
    }
    else if (key == "edge_angle_spread_deg") c.edge_angle_spread_deg = as_number(node, key);
    else if (key == "h_bs_m") c.h_bs_m = as_number(node, key);
    else if (key == "h_ut_m") c.h_ut_m = as_number(node, key);
    else if (key == "shadowing") {
      const auto b = node.value<bool>();
      if (!b) bad("shadowing must be a boolean");
      c.shadowing = *b;
    }
    else if (key == "target_snr_dB") c.target_snr_dB = as_number(node, key);
    else if (key == "reference_snr_dB") c.reference_snr_dB = as_number(node, key);
    else if (key == "pilot_len") c.pilot_len = static_cast<int>(as_integer(node, key));
    else if (key == "edge_positions") {
      const auto* arr = node.as_array();
      if (arr == nullptr) bad("edge_positions must be an array of [x, y] pairs");
      c.edge_positions.clear();
      for (const auto& e : *arr) c.edge_positions.push_back(as_point(e, key));
    }
    else if (key == "noise_reference_position") c.noise_reference_position = as_point(node, key);
    else bad("unknown key '" + std::string(key) + "'");
  }
  scenario::validate(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_toml(const ScenarioConfig& c) {
  toml::table t;
  t.insert("L", c.L);
  t.insert("layout", c.layout == Layout::Triple ? "triple" : "diamond");
  t.insert("cell_radius_m", c.cell_radius_m);
  t.insert("M", int_array(c.M));
  t.insert("K", int_array(c.K));
  t.insert("Ke", int_array(c.Ke));
  t.insert("scatter_fraction", c.scatter_fraction);
  t.insert("edge_band", toml::array{c.edge_band[0], c.edge_band[1]});
  t.insert("tx_power_dBm", c.tx_power_dBm);
  t.insert("carrier_GHz", c.carrier_GHz);
  t.insert("N", c.N);
  t.insert("Np", c.Np);
  t.insert("preamble_len", c.preamble_len);
  t.insert("seed", static_cast<std::int64_t>(c.seed));
  t.insert("pathloss_exponent", c.pathloss_exponent);
  t.insert("edge_angle_spread_deg", c.edge_angle_spread_deg);
  t.insert("h_bs_m", c.h_bs_m);
  t.insert("h_ut_m", c.h_ut_m);
  t.insert("shadowing", c.shadowing);
  t.insert("target_snr_dB", c.target_snr_dB);
  if (c.reference_snr_dB) t.insert("reference_snr_dB", *c.reference_snr_dB);
  t.insert("pilot_len", c.pilot_len);
  if (!c.edge_positions.empty()) {
    toml::array pts;
    for (const auto& p : c.edge_positions) pts.push_back(point_array(p));
    t.insert("edge_positions", std::move(pts));
  }
  if (c.noise_reference_position) t.insert("noise_reference_position", point_array(*c.noise_reference_position));
  std::ostringstream os;
  os << t << '\n';
  return os.str();
}

ScenarioConfig preset(std::string_view name) {
  ScenarioConfig c;
  if (name == "fig3-3bs") return c;
  if (name == "fig2-4bs") {
    c.L = 4;
    c.layout = Layout::Diamond;
    c.M = {12, 12, 12, 12};
    c.K = {8, 8, 8, 8};
    c.Ke = {1, 0, 0, 0};
    const Point corner{-c.cell_radius_m / 2.0, 0.0};
    c.edge_positions = {corner};
    c.noise_reference_position = corner;
    return c;
  }
  if (name == "dense-k16") {
    c.M = {30, 30, 30};
    c.K = {16, 16, 16};
    c.scatter_fraction = 0.8;
    return c;
  }
  bad("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() { return {"fig3-3bs", "fig2-4bs", "dense-k16"}; }

}  // namespace edgeview::config_io
