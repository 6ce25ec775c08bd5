#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "generators.hpp"
#include "hicomp/analysis.hpp"
#include "hicomp/cns.hpp"
#include "hicomp/error.hpp"
#include "hicomp/pme.hpp"

using namespace hicomp;

namespace {

Field tent(const Grid& g, double height = 1.0) {
  return Field::from_function(g, [height](double x) { return height * std::max(0.0, 1.0 - std::abs(x)); });
}

bool bitwise_equal(const Field& a, const Field& b) {
  return a.size() == b.size() &&
         std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("well_prepared_init") {
  const Grid g = make_grid(-8.0, 8.0, 512);
  const PhysParams p = PhysParams::make(1.25, 2.0, 1e-2);
  const Field rho0 = tent(g);
  const CnsState s = well_prepared_init(rho0, p);

  CHECK(diagnostics(s, p).sqrt_rho_v_l2 == 0.0);
  CHECK(s.rho_floor == doctest::Approx(1e-10 * max_value(rho0)));
  std::size_t floor_cells = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(s.rho[i] == std::max(rho0[i], s.rho_floor));
    CHECK(s.momentum_v[i] == 0.0);
    if (rho0[i] < s.rho_floor) ++floor_cells;
  }
  const double added = integrate(s.rho) - integrate(rho0);
  CHECK(added == doctest::Approx(floor_cells * s.rho_floor * g.dx()).epsilon(1e-6));
  CHECK(added / integrate(rho0) <= 1e-8);

  CHECK_THROWS_AS(well_prepared_init(-1.0 * rho0, p), ValidationError);
  CHECK_THROWS_AS(well_prepared_init(Field::zeros(g), p), ValidationError);
  CHECK_THROWS_AS(well_prepared_init(rho0, p, 0.0), ValidationError);
  const Field wide = Field::from_function(g, [](double x) { return std::abs(x) < 7.5 ? 1.0 : 0.0; });
  CHECK_THROWS_AS(well_prepared_init(wide, p), SolverError);
}

TEST_CASE("well-prepared velocity for alpha = 2 is minus the density gradient") {
  const Grid g = make_grid(-8.0, 8.0, 256);
  const PhysParams p = PhysParams::make(2.0, 2.0, 1e-2);
  const CnsState s = well_prepared_init(tent(g), p);
  const Field u = recover_u(s, p);
  const Field d = derivative(s.rho);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(u[i] == -d[i]);
}

TEST_CASE("dx_phi") {
  const Grid g = make_grid(-2.0, 2.0, 400);
  const Field flat = dx_phi(Field::constant(g, 0.3), 1.7);
  for (double v : flat.values()) CHECK(v == 0.0);

  const Field rho = Field::from_function(g, [](double x) { return 0.5 + std::exp(-x * x); });
  const Field d2 = dx_phi(rho, 2.0);
  const Field dr = derivative(rho);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(d2[i] == dr[i]);

  // alpha = 1.5, rho = x^2: phi = 2 rho^{1/2} = 2|x|, so d_x phi = 2 sign(x).
  const Field sq = Field::from_function(g, [](double x) { return x * x; });
  const Field d15 = dx_phi(sq, 1.5);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    const double x = g.center(i);
    if (std::abs(x) > 2 * g.dx()) CHECK(d15[i] == doctest::Approx(x > 0 ? 2.0 : -2.0).epsilon(1e-10));
  }
}

TEST_CASE("recover_u and effective_velocity") {
  const Grid g = make_grid(-4.0, 4.0, 128);
  const PhysParams p = PhysParams::make(1.4, 2.0, 1e-2);
  const CnsState flat{0.0, Field::constant(g, 2.0), Field::constant(g, 2.0 * 0.75), 1e-10};
  const Field u_flat = recover_u(flat, p);
  for (double v : u_flat.values()) CHECK(v == 0.75);

  testgen::Gen gen;
  const Field rho = Field::constant(g, 0.1) + gen.bumps(g);
  const Field m = gen.noise(g, 0.3);
  const CnsState s{0.0, rho, m, 1e-10};
  const Field u = recover_u(s, p);
  const Field phi = dx_phi(s, p);
  const Field v = effective_velocity(s);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(v[i] == m[i] / rho[i]);
    CHECK(u[i] + phi[i] == doctest::Approx(v[i]).epsilon(1e-14).scale(1.0));
  }

  // Floor cells report zero velocity.
  std::vector<double> r(g.size(), 1e-10);
  r[64] = 1.0;
  const CnsState vacuum{0.0, Field(g, r), Field::constant(g, 1e-12), 1e-10};
  const Field vv = effective_velocity(vacuum);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(vv[i] == (i == 64 ? 1e-12 : 0.0));

  const CnsState prepared = well_prepared_init(tent(g), p);
  const Field up = recover_u(prepared, p);
  const Field dp = dx_phi(prepared, p);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(up[i] == -dp[i]);
}

TEST_CASE("cfl_dt") {
  const Grid g = make_grid(0.0, 1.0, 64);
  const double dx = g.dx();
  const PhysParams p = PhysParams::make(2.0, 2.0, 0.0);
  const CnsState unit{0.0, Field::constant(g, 1.0), Field::zeros(g), 1e-10};
  CHECK(cfl_dt(unit, p) == doctest::Approx(0.4 * dx * dx).epsilon(1e-14));

  const CnsState doubled{0.0, Field::constant(g, 2.0), Field::zeros(g), 1e-10};
  CHECK(cfl_dt(doubled, p) == doctest::Approx(0.5 * cfl_dt(unit, p)).epsilon(1e-14));

  // An advective limit takes over once |v| dx exceeds the diffusive scale.
  const CnsState moving{0.0, Field::constant(g, 1.0), Field::constant(g, 100.0), 1e-10};
  CHECK(cfl_dt(moving, p) == doctest::Approx(0.4 * dx / 100.0).epsilon(1e-14));

  // Pressure wave: sqrt(eps gamma rho^{gamma-1}).
  const PhysParams loud = PhysParams::make(2.0, 2.0, 1e6);
  CHECK(cfl_dt(unit, loud) == doctest::Approx(0.4 * dx / std::sqrt(2e6)).epsilon(1e-14));
}

TEST_CASE("cns_step") {
  const Grid g = make_grid(-4.0, 4.0, 128);
  const PhysParams p = PhysParams::make(1.25, 2.0, 1e-2);
  const CnsState flat{0.0, Field::constant(g, 0.8), Field::zeros(g), 1e-10};
  const CnsState next = cns_step(flat, p, cfl_dt(flat, p));
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(next.rho[i] == 0.8);
    CHECK(next.momentum_v[i] == 0.0);
  }
  CHECK_THROWS_AS(cns_step(flat, p, 2.0 * cfl_dt(flat, p)), ValidationError);
  CHECK_THROWS_AS(cns_step(flat, p, -1.0), ValidationError);
}

TEST_CASE("pressureless well-prepared step is the PME step, bitwise") {
  testgen::Gen gen;
  for (int trial = 0; trial < 10; ++trial) {
    const Grid g = make_grid(-4.0, 4.0, 256);
    const PhysParams p = PhysParams::make(gen.uniform(1.1, 2.5), 2.0, 0.0);
    CnsState c = well_prepared_init(gen.bumps(g), p);
    PmeState m{c.t, c.rho};
    for (int step = 0; step < 50; ++step) {
      const double dt = cfl_dt(c, p);
      c = cns_step(c, p, dt);
      m = pme_step(m, p, dt);
      REQUIRE(bitwise_equal(c.rho, m.rho));
      REQUIRE(max_value(c.momentum_v) == 0.0);
      REQUIRE(min_value(c.momentum_v) == 0.0);
    }
  }
}

TEST_CASE("cns_solve_to") {
  const Grid g = make_grid(-8.0, 8.0, 512);
  const PhysParams p = PhysParams::make(1.25, 2.0, 1e-2);
  const CnsState s0 = well_prepared_init(tent(g), p);

  const CnsRun same = cns_solve_to(s0, p, 0.0, {});
  CHECK(same.steps == 0);
  CHECK(bitwise_equal(same.state.rho, s0.rho));

  const std::vector<double> snaps = {0.05, 0.1, 0.2};
  std::vector<DiagnosticsRecord> trace;
  const CnsRun run = cns_solve_to(s0, p, 0.2, snaps, [&](const CnsState& s, double) {
    trace.push_back(diagnostics(s, p));
  });
  REQUIRE(run.snapshots.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(run.snapshots[k].t == snaps[k]);
  CHECK(run.state.t == 0.2);
  CHECK(run.min_dt > 0.0);
  CHECK(run.max_dt <= g.dx() * g.dx());

  const double m0 = integrate(s0.rho);
  CHECK(std::abs(integrate(run.state.rho) - m0) <= 1e-10 * m0);
  CHECK(run.floored_mass <= 1e-10 * m0);

  const double bound = effective_velocity_bound(tent(g), p);
  const double e0 = diagnostics(s0, p).bd_entropy;
  for (const DiagnosticsRecord& d : trace) {
    CHECK(d.sqrt_rho_v_l2 <= 1.05 * bound);
    CHECK(d.max_rho <= (1 + 1e-2) * max_value(s0.rho));
    CHECK(d.bd_entropy <= e0 * (1.0 + 1e-3 * d.t));
  }
  for (std::size_t k = 1; k < trace.size(); ++k)
    CHECK(trace[k].bd_entropy <= trace[k - 1].bd_entropy * (1.0 + 1e-3 * (trace[k].t - trace[k - 1].t)));

  const std::vector<double> unsorted = {0.1, 0.05};
  CHECK_THROWS_AS(cns_solve_to(s0, p, 0.2, unsorted), ValidationError);
  const std::vector<double> late = {0.3};
  CHECK_THROWS_AS(cns_solve_to(s0, p, 0.2, late), ValidationError);
  CHECK_THROWS_AS(cns_solve_to(run.state, p, 0.1, {}), ValidationError);
}

TEST_CASE("property: conservation and bounds on random data") {
  testgen::Gen gen(testgen::kSeed + 7);
  const Grid g = make_grid(-4.0, 4.0, 128);
  for (int trial = 0; trial < 12; ++trial) {
    const PhysParams p =
        PhysParams::make(gen.uniform(1.1, 2.0), gen.uniform(1.2, 3.0), std::pow(10.0, gen.uniform(-3, -1)));
    const Field rho0 = gen.bumps(g);
    const CnsState s0 = well_prepared_init(rho0, p);
    const CnsRun run = cns_solve_to(s0, p, 0.05, {});
    const double m0 = integrate(s0.rho);
    CHECK(std::abs(integrate(run.state.rho) - m0) <= 1e-10 * m0);
    CHECK(min_value(run.state.rho) >= s0.rho_floor);
    CHECK(max_value(run.state.rho) <= (1 + 1e-2) * max_value(rho0));
    CHECK(diagnostics(run.state, p).sqrt_rho_v_l2 <= 1.05 * effective_velocity_bound(rho0, p));
  }
}
