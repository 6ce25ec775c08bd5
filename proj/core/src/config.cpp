#include "hicomp/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "hicomp/barenblatt.hpp"
#include "hicomp/error.hpp"
#include "json.hpp"

namespace hicomp {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ValidationError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) throw ValidationError("unknown key \"" + key + "\" in " + where);
  }
}

double get_real(const json& obj, const char* key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(where + "." + key + " must be a number");
  return v.get<double>();
}

int get_int(const json& obj, const char* key, const std::string& where, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ValidationError(where + "." + key + " must be an integer");
  return v.get<int>();
}

std::vector<double> get_reals(const json& obj, const char* key, std::vector<double> fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array()) throw ValidationError(std::string(key) + " must be an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) throw ValidationError(std::string(key) + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::string kind_name(DatumKind k) {
  switch (k) {
    case DatumKind::Tent: return "tent";
    case DatumKind::Barenblatt: return "barenblatt";
    case DatumKind::FromCsv: return "from_csv";
  }
  return "tent";
}

json to_json(const StudyConfig& c) {
  json doc;
  doc["grid"] = {{"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}, {"n_cells", c.grid.n_cells}};
  json params = {{"alpha", c.alpha}, {"gamma", c.gamma}};
  params["pme_coeff"] = c.pme_coeff ? json(*c.pme_coeff) : json(nullptr);
  doc["params"] = params;
  doc["eps_values"] = c.eps_values;
  doc["t_end"] = c.t_end;
  doc["snapshot_times"] = c.snapshot_times;
  json datum = {{"kind", kind_name(c.initial_datum.kind)}};
  switch (c.initial_datum.kind) {
    case DatumKind::Tent: datum["mass"] = c.initial_datum.mass; break;
    case DatumKind::Barenblatt:
      datum["mass"] = c.initial_datum.mass;
      datum["t0"] = c.initial_datum.t0;
      break;
    case DatumKind::FromCsv: datum["path"] = c.initial_datum.path; break;
  }
  doc["initial_datum"] = datum;
  doc["thresholds"] = {{"support", c.thresholds.support}, {"floor", c.thresholds.floor}};
  doc["output_dir"] = c.output_dir;
  doc["seed"] = c.seed;
  json thetas = json::array();
  for (const auto& b : c.certificate.thetas)
    thetas.push_back({{"center", b.center}, {"radius", b.radius}});
  doc["certificate"] = {{"path_samples", c.certificate.path_samples},
                        {"thetas", thetas},
                        {"eta", c.certificate.eta ? json(*c.certificate.eta) : json(nullptr)},
                        {"cap", c.certificate.cap ? json(*c.certificate.cap) : json(nullptr)}};
  doc["grid_check"] = c.grid_check;
  return doc;
}

std::optional<double> get_optional_real(const json& obj, const char* key,
                                        const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return get_real(obj, key, where, 0.0);
}

}  // namespace

PhysParams StudyConfig::params(double epsilon) const {
  return PhysParams::make(alpha, gamma, epsilon, pme_coeff);
}

double StudyConfig::t_start() const {
  return initial_datum.kind == DatumKind::Barenblatt ? initial_datum.t0 : 0.0;
}

void StudyConfig::validate() const {
  (void)grid.make();
  params(0.0).validate();
  if (eps_values.empty()) throw ValidationError("eps_values must not be empty");
  for (double e : eps_values) {
    if (!std::isfinite(e) || e < 0.0) throw ValidationError("epsilon must be nonnegative");
  }
  for (std::size_t i = 0; i < eps_values.size(); ++i)
    for (std::size_t j = i + 1; j < eps_values.size(); ++j)
      if (eps_values[i] == eps_values[j]) throw ValidationError("eps_values must be distinct");
  if (initial_datum.kind == DatumKind::Barenblatt && !(initial_datum.t0 > 0.0))
    throw ValidationError("initial_datum.t0 must be positive");
  if (initial_datum.kind != DatumKind::FromCsv && !(initial_datum.mass > 0.0))
    throw ValidationError("initial_datum.mass must be positive");
  if (initial_datum.kind == DatumKind::FromCsv && initial_datum.path.empty())
    throw ValidationError("initial_datum.path must name a CSV file");
  const double t0 = t_start();
  if (!std::isfinite(t_end) || !(t_end > t0))
    throw ValidationError("t_end must exceed the start time");
  double previous = -std::numeric_limits<double>::infinity();
  for (double s : snapshot_times) {
    if (!(s >= t0 && s <= t_end))
      throw ValidationError("snapshot_times must lie within [start time, t_end]");
    if (!(s > previous)) throw ValidationError("snapshot_times must be strictly increasing");
    previous = s;
  }
  if (!(thresholds.support > 0.0 && thresholds.support < 1.0))
    throw ValidationError("thresholds.support must lie in (0, 1)");
  if (!(thresholds.floor > 0.0 && thresholds.floor < 1.0))
    throw ValidationError("thresholds.floor must lie in (0, 1)");
  if (certificate.path_samples < 2)
    throw ValidationError("certificate.path_samples must be at least 2");
  for (const auto& b : certificate.thetas) {
    if (!(b.radius > 0.0)) throw ValidationError("certificate theta radius must be positive");
    if (!(b.center - b.radius > grid.x_min && b.center + b.radius < grid.x_max))
      throw ValidationError("certificate theta must be supported inside the grid");
  }
  if (certificate.eta && !(*certificate.eta > 0.0))
    throw ValidationError("certificate.eta must be positive");
  if (certificate.eta && certificate.cap && !(*certificate.cap > *certificate.eta))
    throw ValidationError("certificate.cap must exceed certificate.eta");
}

StudyConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }
  require_keys(doc, "config",
               {"grid", "params", "eps_values", "t_end", "snapshot_times", "initial_datum",
                "thresholds", "output_dir", "seed", "certificate", "grid_check"});
  StudyConfig c;
  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    require_keys(g, "grid", {"x_min", "x_max", "n_cells"});
    c.grid.x_min = get_real(g, "x_min", "grid", c.grid.x_min);
    c.grid.x_max = get_real(g, "x_max", "grid", c.grid.x_max);
    c.grid.n_cells = get_int(g, "n_cells", "grid", c.grid.n_cells);
  }
  if (doc.contains("params")) {
    const json& p = doc.at("params");
    require_keys(p, "params", {"alpha", "gamma", "pme_coeff"});
    c.alpha = get_real(p, "alpha", "params", c.alpha);
    c.gamma = get_real(p, "gamma", "params", c.gamma);
    c.pme_coeff = get_optional_real(p, "pme_coeff", "params");
  }
  c.eps_values = get_reals(doc, "eps_values", c.eps_values);
  c.t_end = get_real(doc, "t_end", "config", c.t_end);
  c.snapshot_times = get_reals(doc, "snapshot_times", c.snapshot_times);
  if (doc.contains("initial_datum")) {
    const json& d = doc.at("initial_datum");
    require_keys(d, "initial_datum", {"kind", "mass", "t0", "path"});
    const std::string kind = d.value("kind", std::string("tent"));
    if (kind == "tent") {
      c.initial_datum.kind = DatumKind::Tent;
    } else if (kind == "barenblatt") {
      c.initial_datum.kind = DatumKind::Barenblatt;
    } else if (kind == "from_csv") {
      c.initial_datum.kind = DatumKind::FromCsv;
    } else {
      throw ValidationError("initial_datum.kind must be tent, barenblatt or from_csv");
    }
    c.initial_datum.mass = get_real(d, "mass", "initial_datum", c.initial_datum.mass);
    c.initial_datum.t0 = get_real(d, "t0", "initial_datum", c.initial_datum.t0);
    if (d.contains("path")) {
      if (!d.at("path").is_string()) throw ValidationError("initial_datum.path must be a string");
      c.initial_datum.path = d.at("path").get<std::string>();
    }
  }
  if (doc.contains("thresholds")) {
    const json& t = doc.at("thresholds");
    require_keys(t, "thresholds", {"support", "floor"});
    c.thresholds.support = get_real(t, "support", "thresholds", c.thresholds.support);
    c.thresholds.floor = get_real(t, "floor", "thresholds", c.thresholds.floor);
  }
  if (doc.contains("output_dir")) {
    if (!doc.at("output_dir").is_string()) throw ValidationError("output_dir must be a string");
    c.output_dir = doc.at("output_dir").get<std::string>();
  }
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned())
      throw ValidationError("seed must be a nonnegative integer");
    c.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("certificate")) {
    const json& cs = doc.at("certificate");
    require_keys(cs, "certificate", {"path_samples", "thetas", "eta", "cap"});
    c.certificate.path_samples =
        get_int(cs, "path_samples", "certificate", c.certificate.path_samples);
    if (cs.contains("thetas")) {
      if (!cs.at("thetas").is_array()) throw ValidationError("certificate.thetas must be an array");
      c.certificate.thetas.clear();
      for (const json& b : cs.at("thetas")) {
        require_keys(b, "certificate.thetas[]", {"center", "radius"});
        if (!b.contains("center") || !b.contains("radius"))
          throw ValidationError("certificate.thetas[] needs center and radius");
        c.certificate.thetas.push_back({get_real(b, "center", "theta", 0.0),
                                        get_real(b, "radius", "theta", 0.0)});
      }
    }
    c.certificate.eta = get_optional_real(cs, "eta", "certificate");
    c.certificate.cap = get_optional_real(cs, "cap", "certificate");
  }
  if (doc.contains("grid_check")) {
    if (!doc.at("grid_check").is_boolean()) throw ValidationError("grid_check must be a boolean");
    c.grid_check = doc.at("grid_check").get<bool>();
  }
  c.validate();
  return c;
}

StudyConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string config_to_json(const StudyConfig& config) { return to_json(config).dump(); }

std::string config_hash(const StudyConfig& config) {
  // The output location does not change results, so it is left out.
  StudyConfig content = config;
  content.output_dir.clear();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : config_to_json(content)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

Field make_initial_field(const StudyConfig& config, const Grid& grid) {
  const InitialDatum& d = config.initial_datum;
  switch (d.kind) {
    case DatumKind::Tent:
      return Field::from_function(grid, [m = d.mass](double x) {
        return m * std::max(0.0, 1.0 - std::abs(x));
      });
    case DatumKind::Barenblatt: {
      const PhysParams p = config.params(0.0);
      return barenblatt_field(barenblatt_params(p.alpha, d.mass, p.pme_coeff), grid, d.t0);
    }
    case DatumKind::FromCsv: {
      std::ifstream in(d.path);
      if (!in) throw ValidationError("cannot read initial datum CSV: " + d.path);
      std::vector<double> values;
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const std::size_t comma = line.find_last_of(',');
        const std::string cell = comma == std::string::npos ? line : line.substr(comma + 1);
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str()) {
          if (values.empty()) continue;  // header row
          throw ValidationError("initial datum CSV: non-numeric entry \"" + cell + "\"");
        }
        values.push_back(v);
      }
      if (values.size() != grid.size()) {
        std::ostringstream msg;
        msg << "initial datum CSV has " << values.size() << " rows, grid has " << grid.size();
        throw ValidationError(msg.str());
      }
      return Field(grid, std::move(values));
    }
  }
  throw ValidationError("unknown initial datum kind");
}

Field make_initial_field(const StudyConfig& config) {
  return make_initial_field(config, config.grid.make());
}

}  // namespace hicomp
