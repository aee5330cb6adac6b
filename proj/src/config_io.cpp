#include "palzone/config_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace palzone {

namespace {

using nlohmann::json;

class Reader {
 public:
  std::vector<std::string> errors;

  // Visits `obj` at `path`; reports keys outside `known`.
  bool object(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
    if (!obj.is_object()) {
      errors.push_back(label(path) + ": expected an object");
      return false;
    }
    const std::set<std::string> k(known.begin(), known.end());
    for (const auto& [key, _] : obj.items())
      if (!k.count(key)) errors.push_back(join(path, key) + ": unknown key");
    return true;
  }

  void number(const json& obj, const std::string& path, const char* key, double& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (v.is_number()) {
      out = v.get<double>();
    } else {
      errors.push_back(join(path, key) + ": expected a number");
    }
  }

  // Accepts a number, "inf", "+inf" or null (infinite).
  void snr(const json& obj, const std::string& path, const char* key, double& out) {
    if (!obj.contains(key)) return;
    if (!snr_value(obj.at(key), out)) errors.push_back(join(path, key) + R"(: expected a number, "inf" or null)");
  }

  void optional_number(const json& obj, const std::string& path, const char* key, std::optional<double>& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (v.is_null()) {
      out.reset();
    } else if (v.is_number()) {
      out = v.get<double>();
    } else {
      errors.push_back(join(path, key) + ": expected a number or null");
    }
  }

  template <typename Int>
  void integer(const json& obj, const std::string& path, const char* key, Int& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      errors.push_back(join(path, key) + ": expected an integer");
      return;
    }
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.is_number_unsigned() || v.get<std::int64_t>() >= 0) {
        out = v.get<Int>();
      } else {
        errors.push_back(join(path, key) + ": expected a non-negative integer");
      }
    } else {
      out = v.get<Int>();
    }
  }

  void boolean(const json& obj, const std::string& path, const char* key, bool& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (v.is_boolean()) {
      out = v.get<bool>();
    } else {
      errors.push_back(join(path, key) + ": expected true or false");
    }
  }

  void numbers(const json& obj, const std::string& path, const char* key, std::vector<double>& out, bool snr = false) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_array()) {
      errors.push_back(join(path, key) + ": expected an array of numbers");
      return;
    }
    std::vector<double> vals;
    for (std::size_t i = 0; i < v.size(); ++i) {
      double x = 0.0;
      const bool ok = snr ? snr_value(v[i], x) : v[i].is_number();
      if (!ok) {
        errors.push_back(join(path, key) + "[" + std::to_string(i) + "]: expected a number");
        continue;
      }
      vals.push_back(snr ? x : v[i].get<double>());
    }
    out = std::move(vals);
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  static std::string label(const std::string& path) { return path.empty() ? "<root>" : path; }

  static bool snr_value(const json& v, double& out) {
    if (v.is_number()) {
      out = v.get<double>();
      return true;
    }
    if (v.is_null() || (v.is_string() && (v == "inf" || v == "+inf" || v == "Infinity"))) {
      out = std::numeric_limits<double>::infinity();
      return true;
    }
    return false;
  }
};

void read_zone(Reader& r, const json& j, const char* key, Zone& z) {
  if (!j.contains(key)) return;
  const json& o = j.at(key);
  if (!r.object(o, key, {"x_min", "x_max", "z_min", "z_max", "nx", "nz"})) return;
  r.number(o, key, "x_min", z.x_min);
  r.number(o, key, "x_max", z.x_max);
  r.number(o, key, "z_min", z.z_min);
  r.number(o, key, "z_max", z.z_max);
  r.integer(o, key, "nx", z.nx);
  r.integer(o, key, "nz", z.nz);
}

json snr_json(double snr) { return std::isinf(snr) && snr > 0 ? json("inf") : json(snr); }

json zone_json(const Zone& z) {
  return {{"x_min", z.x_min}, {"x_max", z.x_max}, {"z_min", z.z_min},
          {"z_max", z.z_max}, {"nx", z.nx},       {"nz", z.nz}};
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  Reader r;
  if (!r.object(j, "", {"medium", "f_center", "audio_frequencies", "array", "bright", "dark", "quadrature", "render",
                        "optimizer", "perturbation"}))
    throw ConfigError(r.errors);

  if (j.contains("medium")) {
    const json& o = j.at("medium");
    if (r.object(o, "medium",
                 {"rho0", "c0", "beta", "temperature_c", "humidity_pct", "pressure_kpa", "alpha_override"})) {
      auto& m = c.medium;
      r.number(o, "medium", "rho0", m.rho0);
      r.number(o, "medium", "c0", m.c0);
      r.number(o, "medium", "beta", m.beta);
      r.number(o, "medium", "temperature_c", m.temperature_c);
      r.number(o, "medium", "humidity_pct", m.humidity_pct);
      r.number(o, "medium", "pressure_kpa", m.pressure_kpa);
      r.optional_number(o, "medium", "alpha_override", m.alpha_override);
    }
  }
  r.number(j, "", "f_center", c.f_center);
  r.numbers(j, "", "audio_frequencies", c.audio_frequencies);

  if (j.contains("array")) {
    const json& o = j.at("array");
    if (r.object(o, "array", {"n_elements", "element_width", "gap", "v0"})) {
      r.integer(o, "array", "n_elements", c.array.n_elements);
      r.number(o, "array", "element_width", c.array.element_width);
      r.number(o, "array", "gap", c.array.gap);
      r.number(o, "array", "v0", c.array.v0);
    }
  }
  read_zone(r, j, "bright", c.bright);
  read_zone(r, j, "dark", c.dark);

  if (j.contains("quadrature")) {
    const json& o = j.at("quadrature");
    if (r.object(o, "quadrature", {"x_min", "x_max", "z_min", "z_max", "dx", "dz"})) {
      auto& q = c.quadrature;
      r.number(o, "quadrature", "x_min", q.x_min);
      r.number(o, "quadrature", "x_max", q.x_max);
      r.number(o, "quadrature", "z_min", q.z_min);
      r.number(o, "quadrature", "z_max", q.z_max);
      r.number(o, "quadrature", "dx", q.dx);
      r.number(o, "quadrature", "dz", q.dz);
    }
  }
  if (j.contains("render")) {
    const json& o = j.at("render");
    if (r.object(o, "render", {"x_min", "x_max", "z_min", "z_max", "step"})) {
      auto& g = c.render;
      r.number(o, "render", "x_min", g.x_min);
      r.number(o, "render", "x_max", g.x_max);
      r.number(o, "render", "z_min", g.z_min);
      r.number(o, "render", "z_max", g.z_max);
      r.number(o, "render", "step", g.step);
    }
  }
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    if (r.object(o, "optimizer", {"n_itr", "seed", "ridge_scale", "multi_start"})) {
      r.integer(o, "optimizer", "n_itr", c.optimizer.n_itr);
      r.integer(o, "optimizer", "seed", c.optimizer.seed);
      r.number(o, "optimizer", "ridge_scale", c.optimizer.ridge_scale);
      r.integer(o, "optimizer", "multi_start", c.optimizer.multi_start);
    }
  }
  if (j.contains("perturbation")) {
    const json& o = j.at("perturbation");
    if (r.object(o, "perturbation",
                 {"snr_db", "phase_range_deg", "seed", "n_trials", "snr_grid", "phase_grid", "sweep_phase_deg",
                  "sweep_snr_db", "evaluate_on_clean"})) {
      auto& p = c.perturbation;
      r.snr(o, "perturbation", "snr_db", p.snr_db);
      r.number(o, "perturbation", "phase_range_deg", p.phase_range_deg);
      r.integer(o, "perturbation", "seed", p.seed);
      r.integer(o, "perturbation", "n_trials", p.n_trials);
      r.numbers(o, "perturbation", "snr_grid", p.snr_grid, true);
      r.numbers(o, "perturbation", "phase_grid", p.phase_grid);
      r.number(o, "perturbation", "sweep_phase_deg", p.sweep_phase_deg);
      r.snr(o, "perturbation", "sweep_snr_db", p.sweep_snr_db);
      r.boolean(o, "perturbation", "evaluate_on_clean", p.evaluate_on_clean);
    }
  }
  if (!r.errors.empty()) throw ConfigError(r.errors);
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json snr_grid = json::array();
  for (double s : c.perturbation.snr_grid) snr_grid.push_back(snr_json(s));
  const auto& m = c.medium;
  const auto& q = c.quadrature;
  const auto& g = c.render;
  const auto& p = c.perturbation;
  return {
      {"medium",
       {{"rho0", m.rho0},
        {"c0", m.c0},
        {"beta", m.beta},
        {"temperature_c", m.temperature_c},
        {"humidity_pct", m.humidity_pct},
        {"pressure_kpa", m.pressure_kpa},
        {"alpha_override", m.alpha_override ? json(*m.alpha_override) : json(nullptr)}}},
      {"f_center", c.f_center},
      {"audio_frequencies", c.audio_frequencies},
      {"array",
       {{"n_elements", c.array.n_elements},
        {"element_width", c.array.element_width},
        {"gap", c.array.gap},
        {"v0", c.array.v0}}},
      {"bright", zone_json(c.bright)},
      {"dark", zone_json(c.dark)},
      {"quadrature",
       {{"x_min", q.x_min}, {"x_max", q.x_max}, {"z_min", q.z_min}, {"z_max", q.z_max}, {"dx", q.dx}, {"dz", q.dz}}},
      {"render", {{"x_min", g.x_min}, {"x_max", g.x_max}, {"z_min", g.z_min}, {"z_max", g.z_max}, {"step", g.step}}},
      {"optimizer",
       {{"n_itr", c.optimizer.n_itr},
        {"seed", c.optimizer.seed},
        {"ridge_scale", c.optimizer.ridge_scale},
        {"multi_start", c.optimizer.multi_start}}},
      {"perturbation",
       {{"snr_db", snr_json(p.snr_db)},
        {"phase_range_deg", p.phase_range_deg},
        {"seed", p.seed},
        {"n_trials", p.n_trials},
        {"snr_grid", snr_grid},
        {"phase_grid", p.phase_grid},
        {"sweep_phase_deg", p.sweep_phase_deg},
        {"sweep_snr_db", snr_json(p.sweep_snr_db)},
        {"evaluate_on_clean", p.evaluate_on_clean}}},
  };
}

void apply_override(json& j, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError({"--set " + std::string(assignment) + ": expected key=value"});
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError({"--set " + key + ": empty path component"});
    if (!node->is_object()) throw ConfigError({"--set " + key + ": " + part + " is not inside an object"});
    if (dot == std::string::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  json j = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError({path.string() + ": cannot open"});
    try {
      j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
      throw ConfigError({path.string() + ": " + e.what()});
    }
  }
  for (const auto& o : overrides) apply_override(j, o);
  return config_from_json(j);
}

}  // namespace palzone
