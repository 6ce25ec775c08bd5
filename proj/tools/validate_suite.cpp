#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "cli.hpp"
#include "hicomp/analysis.hpp"
#include "hicomp/barenblatt.hpp"
#include "hicomp/cns.hpp"
#include "hicomp/pme.hpp"

namespace hicomp::cli {

namespace {

constexpr int kPairs = 5;
constexpr int kSteps = 400;

Field random_bumps(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> center(-1.5, 1.5), width(0.3, 0.8), height(0.2, 1.0);
  std::uniform_int_distribution<int> count(1, 3);
  const int k = count(rng);
  std::vector<double> c(k), w(k), h(k);
  for (int j = 0; j < k; ++j) {
    c[j] = center(rng);
    w[j] = width(rng);
    h[j] = height(rng);
  }
  return Field::from_function(g, [&](double x) {
    double v = 0.0;
    for (int j = 0; j < k; ++j) v += h[j] * std::max(0.0, 1.0 - std::pow((x - c[j]) / w[j], 2));
    return v;
  });
}

double l1_distance(const Field& a, const Field& b) { return lp_norm(a - b, 1.0); }

}  // namespace

std::vector<CheckRow> run_validation_suite(std::uint64_t seed) {
  std::vector<CheckRow> rows;
  const auto add = [&](std::string name, double measured, double tol) {
    rows.push_back({std::move(name), measured, tol, measured <= tol});
  };

  {
    const PhysParams p = PhysParams::make(2.0, 2.0, 0.0);
    const BarenblattParams bp = barenblatt_params(2.0, 1.0, p.pme_coeff);
    const Grid g = make_grid(-8.0, 8.0, 512);
    const PmeState end = pme_solve_to(PmeState{0.5, barenblatt_field(bp, g, 0.5)}, p, 1.0);
    const Field exact = barenblatt_field(bp, g, 1.0);
    add("barenblatt_rel_l1", l1_distance(end.rho, exact) / lp_norm(exact, 1.0), 2e-2);
  }

  std::mt19937_64 rng(seed);
  const Grid g = make_grid(-4.0, 4.0, 256);
  double contraction = 0.0, comparison = 0.0, max_principle = 0.0, pme_mass = 0.0;
  for (int pair = 0; pair < kPairs; ++pair) {
    const PhysParams p = PhysParams::make(pair % 2 ? 2.0 : 1.25, 2.0, 0.0);
    const Field u0 = random_bumps(g, rng);
    const Field v0 = u0 + random_bumps(g, rng);  // v0 >= u0
    const Field w0 = random_bumps(g, rng);
    // One shared step for all three runs keeps the comparison purely discrete.
    const double dt = kPmeCfl * std::min({pme_stable_dt(PmeState{0, u0}, p),
                                          pme_stable_dt(PmeState{0, v0}, p),
                                          pme_stable_dt(PmeState{0, w0}, p)});
    PmeState u{0, u0}, v{0, v0}, w{0, w0};
    for (int s = 0; s < kSteps; ++s) {
      u = pme_step(u, p, dt);
      v = pme_step(v, p, dt);
      w = pme_step(w, p, dt);
    }
    contraction = std::max(contraction, l1_distance(u.rho, w.rho) - l1_distance(u0, w0));
    comparison = std::max(comparison, -min_value(v.rho - u.rho));
    max_principle = std::max({max_principle, max_value(u.rho) - max_value(u0), -min_value(u.rho)});
    pme_mass = std::max(pme_mass, std::abs(integrate(u.rho) - integrate(u0)) / integrate(u0));
  }
  add("l1_contraction", contraction, 1e-10);
  add("comparison_principle", comparison, 1e-10);
  add("max_principle", max_principle, 1e-12);
  add("pme_mass_drift", pme_mass, 1e-10);

  {
    const PhysParams p = PhysParams::make(1.25, 2.0, 1e-2);
    const CnsState init = well_prepared_init(random_bumps(g, rng), p);
    const CnsRun run = cns_solve_to(init, p, 0.1, {});
    add("cns_mass_drift",
        std::abs(integrate(run.state.rho) - integrate(init.rho)) / integrate(init.rho), 1e-10);
  }

  {
    const double w = 1.0 / 16.0;  // 32 cells, kinks on cell faces
    const Grid fine = make_grid(-4.0, 4.0, 4096);
    const Field dipole = Field::from_function(fine, [w](double x) {
      const auto tent = [w](double y) { return std::max(0.0, 1.0 - std::abs(y) / w) / w; };
      return tent(x + 1.0) - tent(x - 1.0);
    });
    const double exact = std::sqrt(2.0 - 7.0 * w / 15.0);
    add("dipole_h_minus1_rel", std::abs(h_minus1_norm(dipole) - exact) / exact, 1e-8);
  }

  {
    const PhysParams p = PhysParams::make(1.25, 2.0, 0.0);
    CnsState c = well_prepared_init(random_bumps(g, rng), p);
    PmeState m{c.t, c.rho};
    double mismatched = 0.0;
    for (int s = 0; s < 1000; ++s) {
      const double dt = cfl_dt(c, p);
      c = cns_step(c, p, dt);
      m = pme_step(m, p, dt);
    }
    for (std::size_t i = 0; i < g.size(); ++i)
      if (std::memcmp(&c.rho.values()[i], &m.rho.values()[i], sizeof(double)) != 0) ++mismatched;
    add("pressureless_bitwise_cells", mismatched, 0.0);
  }
  return rows;
}

}  // namespace hicomp::cli
