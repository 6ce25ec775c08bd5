#include "hicomp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hicomp {

namespace {

using nlohmann::json;

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const PhysParams& p) {
  return {{"alpha", p.alpha}, {"gamma", p.gamma}, {"epsilon", p.epsilon},
          {"pme_coeff", p.pme_coeff}};
}

json to_json(const Grid& g) {
  return {{"x_min", g.x_min()}, {"x_max", g.x_max()}, {"n_cells", g.n_cells()}};
}

json to_json(const SlopeFit& f) {
  return {{"slope", real_or_null(f.slope)},
          {"intercept", real_or_null(f.intercept)},
          {"r_squared", real_or_null(f.r_squared)}};
}

json to_json(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(real_or_null(x));
  return a;
}

json to_json(const std::vector<std::vector<double>>& m) {
  json a = json::array();
  for (const auto& row : m) a.push_back(to_json(std::span<const double>(row)));
  return a;
}

json to_json(const DiagnosticsRecord& d) {
  return {{"t", d.t},
          {"mass", d.mass},
          {"energy", d.energy},
          {"bd_entropy", d.bd_entropy},
          {"sqrt_rho_v_l2", d.sqrt_rho_v_l2},
          {"dx_rho_alpha_half_l2", d.dx_rho_alpha_half_l2},
          {"max_rho", d.max_rho},
          {"viscous_flux_l2", d.viscous_flux_l2}};
}

json certificate_body(const DualCertificate& c) {
  return {{"eta", c.eta},
          {"cap", c.cap},
          {"theta", to_json(c.theta.values())},
          {"lhs", c.lhs},
          {"initial_term", c.initial_term},
          {"rhs_coeff_term", c.rhs_coeff_term},
          {"rhs_momentum_term", c.rhs_momentum_term},
          {"momentum_term_direct", c.momentum_term_direct},
          {"identity_residual", c.identity_residual},
          {"identity_scale", c.identity_scale},
          {"coeff_mismatch", c.coeff_mismatch},
          {"flux_l2", c.flux_l2},
          {"momentum_l2", c.momentum_l2},
          {"dual_gradient_l2", c.dual_gradient_l2},
          {"dual_weighted_lap", c.dual_weighted_lap},
          {"theta_gradient", c.theta_gradient},
          {"bound", c.bound},
          {"measured_c", real_or_null(c.measured_c)},
          {"clamped_fraction", c.clamped_fraction}};
}

std::string header(const Provenance& p) {
  std::ostringstream out;
  out << "# hicomp " << p.kind << "\n"
      << "# config_hash=" << p.config_hash << "\n"
      << "# t=" << format_real(p.t) << "\n"
      << "# alpha=" << format_real(p.params.alpha) << " gamma=" << format_real(p.params.gamma)
      << " epsilon=" << format_real(p.params.epsilon)
      << " pme_coeff=" << format_real(p.params.pme_coeff) << "\n";
  return out.str();
}

std::string columns(std::initializer_list<const char*> names,
                    std::initializer_list<std::span<const double>> cols) {
  std::string out;
  bool first = true;
  for (const char* n : names) {
    if (!first) out += ',';
    out += n;
    first = false;
  }
  out += '\n';
  const std::size_t rows = cols.begin()->size();
  for (std::size_t i = 0; i < rows; ++i) {
    first = true;
    for (const auto& c : cols) {
      if (!first) out += ',';
      out += format_real(c[i]);
      first = false;
    }
    out += '\n';
  }
  return out;
}

std::vector<double> centers(const Grid& g) {
  std::vector<double> x(g.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = g.center(i);
  return x;
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string pme_snapshot_csv(const PmeState& state, const PhysParams& params,
                             const Provenance& prov) {
  const std::vector<double> x = centers(state.rho.grid());
  const Field p = pme_pressure(state, params);
  return header(prov) + columns({"x", "rho", "pressure"}, {x, state.rho.values(), p.values()});
}

std::string cns_snapshot_csv(const CnsState& state, const PhysParams& params,
                             const Provenance& prov) {
  const std::vector<double> x = centers(state.rho.grid());
  const Field v = effective_velocity(state);
  const Field u = recover_u(state, params);
  return header(prov) +
         columns({"x", "rho", "v", "u"}, {x, state.rho.values(), v.values(), u.values()});
}

std::string diagnostics_csv(std::span<const DiagnosticsRecord> records, const Provenance& prov) {
  std::string out = header(prov);
  out += "t,mass,energy,bd_entropy,sqrt_rho_v_l2,dx_rho_alpha_half_l2,max_rho,viscous_flux_l2\n";
  for (const auto& d : records) {
    for (double v : {d.t, d.mass, d.energy, d.bd_entropy, d.sqrt_rho_v_l2,
                     d.dx_rho_alpha_half_l2, d.max_rho}) {
      out += format_real(v);
      out += ',';
    }
    out += format_real(d.viscous_flux_l2);
    out += '\n';
  }
  return out;
}

std::string rate_table_csv(const RateStudyResult& r, RateTable table, const Provenance& prov) {
  const auto& m = table == RateTable::H1            ? r.errors_h1
                  : table == RateTable::L2          ? r.errors_l2
                  : table == RateTable::MassOutside ? r.mass_outside
                                                    : r.mass_outside_raw;
  std::string out = header(prov);
  out += "t";
  for (double e : r.eps_values) out += ",eps=" + format_real(e);
  out += '\n';
  for (std::size_t j = 0; j < r.t_snapshots.size(); ++j) {
    out += format_real(r.t_snapshots[j]);
    for (double v : m[j]) out += ',' + format_real(v);
    out += '\n';
  }
  return out;
}

std::string certificate_json(const DualCertificate& cert, const Grid& grid,
                             const PhysParams& params, const std::string& config_hash) {
  json doc = certificate_body(cert);
  doc["grid"] = to_json(grid);
  doc["params"] = to_json(params);
  doc["config_hash"] = config_hash;
  return doc.dump(2) + "\n";
}

std::string rate_study_json(const RateStudyResult& r, const StudyConfig& config) {
  const Grid grid = config.grid.make();
  json doc;
  doc["config_hash"] = config_hash(config);
  doc["config"] = json::parse(config_to_json(config));
  doc["alpha"] = r.alpha;
  doc["gamma"] = r.gamma;
  doc["t_snapshots"] = to_json(std::span<const double>(r.t_snapshots));
  doc["eps_values"] = to_json(std::span<const double>(r.eps_values));
  doc["errors_h1"] = to_json(r.errors_h1);
  doc["errors_l2"] = to_json(r.errors_l2);
  doc["mass_outside"] = to_json(r.mass_outside);
  doc["mass_outside_raw"] = to_json(r.mass_outside_raw);
  json supports = json::array();
  for (const auto& s : r.supports) supports.push_back({s.left, s.right});
  doc["supports"] = supports;
  doc["slope_h1"] = to_json(r.slope_h1);
  doc["slope_l2"] = to_json(r.slope_l2);
  doc["slope_mass"] = to_json(r.slope_mass);
  doc["slope_mass_raw"] = to_json(r.slope_mass_raw);
  for (auto [key, fits] : {std::pair{"snapshot_slopes_h1", &r.snapshot_slopes_h1},
                           std::pair{"snapshot_slopes_l2", &r.snapshot_slopes_l2},
                           std::pair{"snapshot_slopes_mass", &r.snapshot_slopes_mass}}) {
    json a = json::array();
    for (const auto& f : *fits) a.push_back(to_json(f));
    doc[key] = a;
  }
  doc["slope_support_growth"] = to_json(r.slope_support_growth);
  doc["grid_convergence_ratio"] = r.grid_convergence_ratio;
  doc["grid_change_mass"] = r.grid_change_mass;
  doc["grid_checked"] = r.grid_checked;
  doc["grid_converged"] = r.grid_converged;
  doc["l2_hypothesis_holds"] = r.l2_hypothesis_holds;
  json runs = json::array();
  for (const auto& run : r.runs) {
    json j = {{"epsilon", run.epsilon},
              {"sup_sqrt_rho_v", run.sup_sqrt_rho_v},
              {"velocity_bound", run.velocity_bound},
              {"mass_drift", run.mass_drift},
              {"floored_mass", run.floored_mass},
              {"steps", run.steps}};
    json diag = json::array();
    for (const auto& d : run.diagnostics) diag.push_back(to_json(d));
    j["diagnostics"] = diag;
    json certs = json::array();
    for (const auto& c : run.certificates) {
      json body = certificate_body(c);
      body.erase("theta");
      certs.push_back(body);
    }
    j["certificates"] = certs;
    runs.push_back(j);
  }
  doc["runs"] = runs;
  doc["grid"] = to_json(grid);
  return doc.dump(2) + "\n";
}

std::string support_study_json(const SupportGrowthResult& r, const StudyConfig& config) {
  json doc;
  doc["config_hash"] = config_hash(config);
  doc["config"] = json::parse(config_to_json(config));
  doc["exponent"] = to_json(r.exponent);
  doc["decay"] = to_json(r.decay);
  doc["expected_exponent"] = 1.0 / (config.alpha + 1.0);
  doc["times"] = to_json(std::span<const double>(r.times));
  doc["s_right"] = to_json(std::span<const double>(r.s_right));
  doc["max_rho"] = to_json(std::span<const double>(r.max_rho));
  doc["offset"] = r.offset;
  return doc.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " +
                        ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out.flush()) throw IoError("write failed: " + path.string());
}

}  // namespace hicomp
