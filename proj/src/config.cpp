#include "robust/config.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "json.hpp"

namespace robust {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path + ": expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!keys.count(key)) throw ConfigError(path + "." + key + ": unknown key");
}

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ConfigError(path + "." + key + ": missing required key");
  return obj.at(key);
}

double get_number(const json& obj, const std::string& path, const char* key) {
  const auto& v = require(obj, path, key);
  if (!v.is_number()) throw ConfigError(path + "." + key + ": expected a number");
  return v.get<double>();
}

double get_number_or(const json& obj, const std::string& path, const char* key, double fallback) {
  return obj.contains(key) ? get_number(obj, path, key) : fallback;
}

template <typename Int>
Int get_integer_or(const json& obj, const std::string& path, const char* key, Int fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(path + "." + key + ": expected an integer");
  if constexpr (std::is_unsigned_v<Int>) {
    if (v.is_number_unsigned()) return v.get<Int>();
    if (v.get<std::int64_t>() < 0) throw ConfigError(path + "." + key + ": must be non-negative");
  }
  return v.get<Int>();
}

CoefficientFn parse_coefficient(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected a coefficient object");
  const auto& kind_v = require(j, path, "kind");
  if (!kind_v.is_string()) throw ConfigError(path + ".kind: expected a string");
  const auto kind = kind_v.get<std::string>();
  try {
    if (kind == "constant") {
      reject_unknown(j, path, {"kind", "value"});
      return CoefficientFn::constant(get_number(j, path, "value"));
    }
    if (kind == "smooth_ramp") {
      reject_unknown(j, path, {"kind", "left", "right", "radius"});
      return CoefficientFn::smooth_ramp(get_number(j, path, "left"), get_number(j, path, "right"),
                                        get_number(j, path, "radius"));
    }
    if (kind == "piecewise_linear") {
      reject_unknown(j, path, {"kind", "knots", "radius"});
      const auto& knots_v = require(j, path, "knots");
      if (!knots_v.is_array()) throw ConfigError(path + ".knots: expected an array");
      std::vector<std::pair<double, double>> knots;
      for (std::size_t i = 0; i < knots_v.size(); ++i) {
        const auto& k = knots_v[i];
        if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
          throw ConfigError(path + ".knots[" + std::to_string(i) + "]: expected [y, value]");
        knots.emplace_back(k[0].get<double>(), k[1].get<double>());
      }
      return CoefficientFn::piecewise_linear(std::move(knots), get_number(j, path, "radius"));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  throw ConfigError(path + ".kind: unknown coefficient kind '" + kind + "'");
}

json dump_coefficient(const CoefficientFn& f) {
  switch (f.kind()) {
    case CoefficientFn::Kind::constant:
      return {{"kind", "constant"}, {"value", f.left_tail()}};
    case CoefficientFn::Kind::smooth_ramp:
      return {{"kind", "smooth_ramp"},
              {"left", f.left_tail()},
              {"right", f.right_tail()},
              {"radius", f.tail_radius()}};
    case CoefficientFn::Kind::piecewise_linear: {
      json knots = json::array();
      for (const auto& [y, v] : f.knots()) knots.push_back({y, v});
      return {{"kind", "piecewise_linear"}, {"radius", f.tail_radius()}, {"knots", knots}};
    }
  }
  return {};
}

json to_json(const RunConfig& c) {
  json j;
  j["model"] = {{"b", dump_coefficient(c.model.b)},
                {"beta", dump_coefficient(c.model.beta)},
                {"r", dump_coefficient(c.model.r)},
                {"rho", c.model.rho}};
  j["rectangle"] = {{"mu_minus", c.rectangle.mu_minus()},
                    {"mu_plus", c.rectangle.mu_plus()},
                    {"sigma_minus", c.rectangle.sigma_minus()},
                    {"sigma_plus", c.rectangle.sigma_plus()}};
  j["utility"] = {{"q", c.utility.q()}};
  j["grid"] = {{"T", c.grid.horizon()},
               {"n_t", c.grid.n_t()},
               {"n_y", c.grid.n_y()},
               {"y_radius", c.grid.y_radius()},
               {"theta", c.grid.theta()}};
  j["sim"] = {{"n_paths", c.sim.n_paths},
              {"n_steps", c.sim.n_steps},
              {"seed", c.sim.seed},
              {"x0", c.sim.x0},
              {"y0", c.sim.y0}};
  j["verify"] = {{"random_deviations", c.verify.random_points},
                 {"policy_scales", c.verify.policy_scales},
                 {"seed", c.verify.seed},
                 {"pde_tolerance", c.verify.pde_tolerance}};
  if (c.output) j["output"] = *c.output;
  return j;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("syntax error: ") + e.what());
  }
  reject_unknown(root, "config", {"model", "rectangle", "utility", "grid", "sim", "verify", "output"});

  const auto& model_j = require(root, "config", "model");
  reject_unknown(model_j, "model", {"b", "beta", "r", "rho"});
  auto b = parse_coefficient(require(model_j, "model", "b"), "model.b");
  auto beta = parse_coefficient(require(model_j, "model", "beta"), "model.beta");
  auto r = parse_coefficient(require(model_j, "model", "r"), "model.r");
  const double rho = get_number(model_j, "model", "rho");

  const auto& rect_j = require(root, "config", "rectangle");
  reject_unknown(rect_j, "rectangle", {"mu_minus", "mu_plus", "sigma_minus", "sigma_plus"});

  const auto& util_j = require(root, "config", "utility");
  reject_unknown(util_j, "utility", {"q"});

  const auto& grid_j = require(root, "config", "grid");
  reject_unknown(grid_j, "grid", {"T", "n_t", "n_y", "y_radius", "theta"});

  const json empty = json::object();
  const auto& sim_j = root.contains("sim") ? root.at("sim") : empty;
  reject_unknown(sim_j, "sim", {"n_paths", "n_steps", "seed", "x0", "y0"});
  const auto& ver_j = root.contains("verify") ? root.at("verify") : empty;
  reject_unknown(ver_j, "verify", {"random_deviations", "policy_scales", "seed", "pde_tolerance"});

  std::string section = "model";
  try {
    MarketModel model(std::move(b), std::move(beta), std::move(r), rho);
    section = "rectangle";
    UncertaintyRectangle rect(get_number(rect_j, "rectangle", "mu_minus"),
                              get_number(rect_j, "rectangle", "mu_plus"),
                              get_number(rect_j, "rectangle", "sigma_minus"),
                              get_number(rect_j, "rectangle", "sigma_plus"));
    section = "utility";
    PowerUtility util(get_number(util_j, "utility", "q"));
    section = "grid";
    const double horizon = get_number(grid_j, "grid", "T");
    const int n_t = get_integer_or<int>(grid_j, "grid", "n_t", 0);
    const int n_y = get_integer_or<int>(grid_j, "grid", "n_y", 0);
    if (!grid_j.contains("n_t")) throw ConfigError("grid.n_t: missing required key");
    if (!grid_j.contains("n_y")) throw ConfigError("grid.n_y: missing required key");
    const double y_radius = get_number_or(grid_j, "grid", "y_radius", model.tail_radius() + 2.0);
    const double theta = get_number_or(grid_j, "grid", "theta", 0.5);
    GridSpec grid(horizon, n_t, y_radius, n_y, theta);

    section = "sim";
    SimConfig sim;
    sim.n_paths = get_integer_or<std::int64_t>(sim_j, "sim", "n_paths", sim.n_paths);
    sim.n_steps = get_integer_or<int>(sim_j, "sim", "n_steps", sim.n_steps);
    sim.seed = get_integer_or<std::uint64_t>(sim_j, "sim", "seed", sim.seed);
    sim.x0 = get_number_or(sim_j, "sim", "x0", sim.x0);
    sim.y0 = get_number_or(sim_j, "sim", "y0", sim.y0);
    sim.horizon = horizon;
    sim.validate();

    section = "verify";
    DeviationSpec ver;
    ver.random_points = get_integer_or<int>(ver_j, "verify", "random_deviations", ver.random_points);
    if (ver.random_points < 0) throw ConfigError("verify.random_deviations: must be >= 0");
    ver.seed = get_integer_or<std::uint64_t>(ver_j, "verify", "seed", ver.seed);
    ver.pde_tolerance = get_number_or(ver_j, "verify", "pde_tolerance", ver.pde_tolerance);
    if (ver_j.contains("policy_scales")) {
      const auto& arr = ver_j.at("policy_scales");
      if (!arr.is_array()) throw ConfigError("verify.policy_scales: expected an array");
      ver.policy_scales.clear();
      for (const auto& v : arr) {
        if (!v.is_number()) throw ConfigError("verify.policy_scales: expected numbers");
        ver.policy_scales.push_back(v.get<double>());
      }
    }

    std::optional<std::string> output;
    if (root.contains("output")) {
      if (!root.at("output").is_string()) throw ConfigError("output: expected a string");
      output = root.at("output").get<std::string>();
    }
    return RunConfig{std::move(model), rect, util, grid, sim, std::move(ver), std::move(output)};
  } catch (const std::invalid_argument& e) {
    throw ConfigError(section + ": " + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const RunConfig& c) { return fnv1a_hex(to_json(c).dump()); }

std::string surface_hash(const RunConfig& c) {
  const auto j = to_json(c);
  json part = {{"model", j["model"]}, {"rectangle", j["rectangle"]}, {"utility", j["utility"]},
               {"grid", j["grid"]}};
  return fnv1a_hex(part.dump());
}

}  // namespace robust
