#include "oscad/config.hpp"

#include <cstdio>
#include <set>

#include "json.hpp"
#include "oscad/errors.hpp"
#include "oscad/level_set.hpp"
#include "oscad/timefactor.hpp"
#include "oscad/velocity.hpp"

namespace oscad {
namespace {

using json = nlohmann::json;

template <class C, class F>
void visit_fields(C& c, F&& f) {
  f("a", c.a);
  f("b", c.b);
  f("shape", c.shape);
  f("shape_cx", c.shape_cx);
  f("shape_cy", c.shape_cy);
  f("shape_radius", c.shape_radius);
  f("walls", c.walls);
  f("ghost_bc", c.ghost_bc);
  f("D", c.D);
  f("M", c.M);
  f("delta", c.delta);
  f("phi", c.phi);
  f("L_cut", c.L_cut);
  f("epsilon", c.epsilon);
  f("time_factor", c.time_factor);
  f("velocity", c.velocity);
  f("A", c.A);
  f("gamma", c.gamma);
  f("u", c.u);
  f("ic_x", c.ic_x);
  f("ic_y", c.ic_y);
  f("ic_sigma", c.ic_sigma);
  f("mms_x1", c.mms_x1);
  f("mms_y1", c.mms_y1);
  f("mms_x2", c.mms_x2);
  f("mms_y2", c.mms_y2);
  f("mms_sigma", c.mms_sigma);
  f("mms_wall", c.mms_wall);
  f("N", c.N);
  f("space_order", c.space_order);
  f("dt", c.dt);
  f("order", c.order);
  f("t_fin", c.t_fin);
  f("dt_ref", c.dt_ref);
  f("N_ref", c.N_ref);
  f("N_list", c.N_list);
  f("nts_list", c.nts_list);
  f("eps_list", c.eps_list);
  f("dt_list", c.dt_list);
  f("orders", c.orders);
  f("mode", c.mode);
  f("axis", c.axis);
  f("fit_points", c.fit_points);
  f("csv", c.csv);
  f("px", c.px);
  f("py", c.py);
  f("stride", c.stride);
  f("repeats", c.repeats);
  f("threads", c.threads);
}

json to_json_obj(const ExperimentConfig& cfg) {
  json j = json::object();
  visit_fields(cfg, [&](const char* name, const auto& v) {
    using T = std::decay_t<decltype(v)>;
    if constexpr (std::is_same_v<T, std::optional<double>>)
      j[name] = v ? json(*v) : json(nullptr);
    else
      j[name] = v;
  });
  return j;
}

ExperimentConfig from_json_obj(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  ExperimentConfig cfg;
  std::set<std::string> known;
  visit_fields(cfg, [&](const char* name, auto& v) {
    known.insert(name);
    if (!j.contains(name)) return;
    using T = std::decay_t<decltype(v)>;
    try {
      if constexpr (std::is_same_v<T, std::optional<double>>) {
        if (j[name].is_null())
          v.reset();
        else
          v = j[name].get<double>();
      } else {
        v = j[name].get<T>();
      }
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad value for '") + name + "': " + e.what());
    }
  });
  for (const auto& [k, _] : j.items())
    if (!known.count(k)) throw ConfigError("unknown configuration key '" + k + "'");
  return cfg;
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  return from_json_obj(j);
}

std::string config_to_json(const ExperimentConfig& cfg) { return to_json_obj(cfg).dump(2); }

ExperimentConfig apply_overrides(const ExperimentConfig& cfg, const std::vector<std::string>& assignments) {
  json j = to_json_obj(cfg);
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + a + "' is not key=value");
    const std::string key = a.substr(0, eq), val = a.substr(eq + 1);
    if (!j.contains(key)) throw ConfigError("unknown configuration key '" + key + "'");
    json v;
    try {
      v = json::parse(val);
    } catch (const json::exception&) {
      v = val;
    }
    j[key] = v;
  }
  return from_json_obj(j);
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (!(c.b > c.a)) fail("domain needs b > a");
  const ShapeKind shape = shape_from_string(c.shape);
  if (!(c.epsilon > 0 && c.epsilon <= 1)) fail("epsilon must lie in (0, 1]");
  for (double e : c.eps_list)
    if (!(e > 0 && e <= 1)) fail("eps_list entries must lie in (0, 1]");
  if (!(c.dt > 0) || !(c.t_fin > 0) || !(c.dt_ref > 0)) fail("dt, t_fin and dt_ref must be positive");
  for (double d : c.dt_list)
    if (!(d > 0)) fail("dt_list entries must be positive");
  if (c.N < 4 || c.N_ref < 4) fail("N must be at least 4");
  if (shape != ShapeKind::None && (c.N < 8 || c.N_ref < 8)) fail("N must be at least 8 when a shape is present");
  for (int n : c.N_list)
    if (n < 4 || (shape != ShapeKind::None && n < 8)) fail("N_list entry too small");
  for (long n : c.nts_list)
    if (n < 1) fail("nts_list entries must be positive");
  if (c.order < 1 || c.order > 3) fail("order must be 1, 2 or 3");
  for (int o : c.orders)
    if (o < 1 || o > 3) fail("orders entries must be 1, 2 or 3");
  if (c.space_order != 2 && c.space_order != 4) fail("space_order must be 2 or 4");
  if (c.space_order == 2 && shape != ShapeKind::None) fail("second order operators need the plain square");
  if (!(c.D > 0)) fail("D must be positive");
  if (c.M && !(*c.M > 0)) fail("M must be positive");
  if (c.walls != "dirichlet" && c.walls != "neumann") fail("walls must be dirichlet or neumann");
  if (c.ghost_bc != "robin" && c.ghost_bc != "dirichlet") fail("ghost_bc must be robin or dirichlet");
  if (shape == ShapeKind::Circle && !(c.shape_radius > 0)) fail("circle radius must be positive");
  velocity_from_string(c.velocity);
  time_factor_from_string(c.time_factor);
  if (!(c.ic_sigma > 0) || !(c.mms_sigma > 0)) fail("Gaussian widths must be positive");
  if (c.mms_wall != "zero" && c.mms_wall != "exact") fail("mms_wall must be zero or exact");
  if (c.mode != "mms" && c.mode != "reference") fail("mode must be mms or reference");
  if (c.axis != "time" && c.axis != "space") fail("axis must be time or space");
  if (c.fit_points < 2) fail("fit_points must be at least 2");
  if (c.stride < 1) fail("stride must be positive");
  if (c.repeats < 1) fail("repeats must be positive");
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string s = to_json_obj(cfg).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace oscad
