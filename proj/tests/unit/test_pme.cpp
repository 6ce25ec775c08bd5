#include <cmath>
#include <vector>

#include "doctest.h"
#include "generators.hpp"
#include "hicomp/barenblatt.hpp"
#include "hicomp/error.hpp"
#include "hicomp/pme.hpp"

using namespace hicomp;

namespace {

/// int (C - kappa xi^2)_+^m dxi = C^{m+1/2} kappa^{-1/2} B(1/2, m+1), m = 1/(alpha-1).
double closed_form_mass(double alpha, double c) {
  const double m = 1.0 / (alpha - 1.0);
  const double kappa = (alpha - 1.0) / (2.0 * alpha * (alpha + 1.0));
  return std::pow(c, m + 0.5) / std::sqrt(kappa) * std::beta(0.5, m + 1.0);
}

/// Composite Simpson over the support of U(t, .).
double simpson_mass(const BarenblattParams& p, double t, int panels = 20000) {
  const double r = p.support_radius(t);
  const double h = 2.0 * r / panels;
  double sum = barenblatt_eval(p, t, -r) + barenblatt_eval(p, t, r);
  for (int k = 1; k < panels; ++k) sum += (k % 2 ? 4.0 : 2.0) * barenblatt_eval(p, t, -r + k * h);
  return sum * h / 3.0;
}

std::pair<std::size_t, std::size_t> positive_range(const Field& f) {
  std::size_t lo = f.size(), hi = 0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] > 0.0) {
      lo = std::min(lo, i);
      hi = i;
    }
  return {lo, hi};
}

double l1_rel(const Field& a, const Field& b) { return lp_norm(a - b, 1.0) / lp_norm(b, 1.0); }

}  // namespace

TEST_CASE("PhysParams validation") {
  CHECK(PhysParams::make(2.0, 2.0, 0.1).pme_coeff == 0.5);
  CHECK(PhysParams::make(2.0, 2.0, 0.1, 1.0).pme_coeff == 1.0);
  CHECK_THROWS_WITH_AS(PhysParams::make(0.9, 2.0, 0.1), "alpha must exceed 1", ValidationError);
  CHECK_THROWS_AS(PhysParams::make(2.0, 1.0, 0.1), ValidationError);
  CHECK_THROWS_AS(PhysParams::make(2.0, 2.0, -1.0), ValidationError);
  CHECK_THROWS_AS(PhysParams::make(2.0, 2.0, 0.1, 0.0), ValidationError);
  CHECK_NOTHROW(PhysParams::make(2.0, 2.0, 0.0));
}

TEST_CASE("spow fast paths agree with pow") {
  for (double x : {0.0, 1e-12, 0.3, 1.0, 7.5})
    for (double e : {0.25, 0.5, 1.0, 2.0, 1.25, 0.75})
      CHECK(spow(x, e) == doctest::Approx(std::pow(x, e)).epsilon(1e-15));
}

TEST_CASE("barenblatt_params") {
  const BarenblattParams p = barenblatt_params(2.0, 1.0, 0.5);
  CHECK(p.kappa == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
  const double m_unit = 4.0 / 3.0 * std::sqrt(12.0);
  CHECK(barenblatt_params(2.0, m_unit, 0.5).c_const == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(barenblatt_params(2.0, 0.0, 0.5), ValidationError);
  CHECK_THROWS_AS(barenblatt_params(1.0, 1.0, 0.5), ValidationError);
  CHECK_THROWS_AS(barenblatt_params(2.0, 1.0, -0.5), ValidationError);
}

TEST_CASE("barenblatt profile mass matches the Beta-function closed form") {
  for (double alpha : {1.25, 1.5, 2.0, 3.0})
    for (double c : {0.3, 1.0, 2.0})
      CHECK(barenblatt_profile_mass(alpha, c) ==
            doctest::Approx(closed_form_mass(alpha, c)).epsilon(1e-10));
  for (double alpha : {1.25, 1.5, 2.0, 3.0}) {
    const BarenblattParams p = barenblatt_params(alpha, 2.5, 1.0 / alpha);
    CHECK(closed_form_mass(alpha, p.c_const) == doctest::Approx(2.5).epsilon(1e-9));
  }
}

TEST_CASE("barenblatt_eval") {
  const double m_unit = 4.0 / 3.0 * std::sqrt(12.0);
  const BarenblattParams p = barenblatt_params(2.0, m_unit, 0.5);
  for (double t : {0.5, 1.0, 2.0, 8.0}) {
    const double s = 0.5 * t;
    CHECK(barenblatt_eval(p, t, 0.0) == doctest::Approx(std::pow(s, -1.0 / 3.0)).epsilon(1e-9));
    const double r = std::sqrt(12.0) * std::cbrt(s);
    CHECK(p.support_radius(t) == doctest::Approx(r).epsilon(1e-9));
    CHECK(barenblatt_eval(p, t, 1.0001 * r) == 0.0);
    CHECK(barenblatt_eval(p, t, -1.0001 * r) == 0.0);
    CHECK(barenblatt_eval(p, t, 0.9 * r) > 0.0);
    // Edge speed is the time derivative of the radius.
    const double h = 1e-6 * t;
    const double fd = (p.support_radius(t + h) - p.support_radius(t - h)) / (2 * h);
    CHECK(p.edge_speed(t) == doctest::Approx(fd).epsilon(1e-7));
  }
  CHECK_THROWS_AS(barenblatt_eval(p, 0.0, 0.0), ValidationError);
  CHECK_THROWS_AS(barenblatt_eval(p, -1.0, 0.0), ValidationError);
}

TEST_CASE("barenblatt mass is conserved in time (Simpson oracle)") {
  for (double alpha : {1.5, 2.0, 4.0 / 3.0}) {
    const BarenblattParams p = barenblatt_params(alpha, 1.0, 1.0 / alpha);
    for (double t : {0.5, 1.0, 2.0}) CHECK(simpson_mass(p, t) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("pme_pressure") {
  const Grid g = make_grid(-8.0, 8.0, 256);
  const PhysParams p2 = PhysParams::make(2.0, 2.0, 0.0);
  const Field vac = pme_pressure(PmeState{0, Field::zeros(g)}, p2);
  for (double v : vac.values()) CHECK(v == 0.0);
  const Field unit = pme_pressure(PmeState{0, Field::constant(g, 1.0)}, p2);
  for (double v : unit.values()) CHECK(v == 2.0);

  const BarenblattParams b = barenblatt_params(2.0, 1.0, p2.pme_coeff);
  const double t = 1.3, s = p2.pme_coeff * t;
  const Field pressure = pme_pressure(PmeState{t, barenblatt_field(b, g, t)}, p2);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.center(i);
    const double exact =
        2.0 * std::pow(s, -1.0 / 3.0) * std::max(0.0, b.c_const - b.kappa * x * x * std::pow(s, -2.0 / 3.0));
    CHECK(pressure[i] == doctest::Approx(exact).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("interface_positions") {
  const Grid g = make_grid(-8.0, 8.0, 2048);
  const double m_unit = 4.0 / 3.0 * std::sqrt(12.0);
  const BarenblattParams b = barenblatt_params(2.0, m_unit, 0.5);
  const Interface omega = interface_positions(barenblatt_field(b, g, 2.0));  // s = 1
  CHECK(std::abs(omega.right - std::sqrt(12.0)) <= g.dx());
  CHECK(std::abs(omega.left + std::sqrt(12.0)) <= g.dx());

  std::vector<double> one(g.size(), 0.0);
  one[700] = 3.0;
  const Interface single = interface_positions(Field(g, one));
  CHECK(single.left == doctest::Approx(g.center(700) - g.dx() / 2));
  CHECK(single.right == doctest::Approx(g.center(700) + g.dx() / 2));

  CHECK_THROWS_AS(interface_positions(Field::zeros(g)), ValidationError);
  CHECK_THROWS_AS(interface_positions(Field(g, one), 0.0), ValidationError);
}

TEST_CASE("pme_step elementary cases") {
  const Grid g = make_grid(-4.0, 4.0, 64);
  const PhysParams p = PhysParams::make(1.5, 2.0, 0.0);
  const PmeState flat{0, Field::constant(g, 0.7)};
  const PmeState after = pme_step(flat, p, 0.4 * pme_stable_dt(flat, p));
  for (double v : after.rho.values()) CHECK(v == 0.7);
  const PmeState vac = pme_step(PmeState{0, Field::zeros(g)}, p, 1e-3);
  for (double v : vac.rho.values()) CHECK(v == 0.0);

  const double limit = pme_stable_dt(flat, p);
  CHECK(limit == doctest::Approx(g.dx() * g.dx() / (2 * p.pme_coeff * 1.5 * std::pow(0.7, 0.5))));
  CHECK_THROWS_AS(pme_step(flat, p, 1.01 * limit), ValidationError);
  CHECK_THROWS_AS(pme_step(flat, p, -1e-3), ValidationError);
  CHECK(pme_step(flat, p, 0.25 * limit).t == doctest::Approx(0.25 * limit));
}

TEST_CASE("pme_step is consistent with the Barenblatt solution") {
  // One step from exact data: the error per unit time shrinks under refinement.
  const PhysParams p = PhysParams::make(2.0, 2.0, 0.0);
  const BarenblattParams b = barenblatt_params(2.0, 1.0, p.pme_coeff);
  std::vector<double> rate;
  for (int n : {512, 1024, 2048}) {
    const Grid g = make_grid(-8.0, 8.0, n);
    const PmeState s0{0.5, barenblatt_field(b, g, 0.5)};
    const double dt = 0.4 * pme_stable_dt(s0, p);
    const PmeState s1 = pme_step(s0, p, dt);
    rate.push_back(lp_norm(s1.rho - barenblatt_field(b, g, 0.5 + dt), 1.0) / dt);
  }
  MESSAGE("one-step L1 error / dt: " << rate[0] << ", " << rate[1] << ", " << rate[2]);
  CHECK(rate[1] < 0.7 * rate[0]);
  CHECK(rate[2] < 0.7 * rate[1]);
}

TEST_CASE("pme_solve_to") {
  const PhysParams p = PhysParams::make(2.0, 2.0, 0.0);
  const BarenblattParams b = barenblatt_params(2.0, 1.0, p.pme_coeff);
  const Grid g = make_grid(-8.0, 8.0, 512);
  const PmeState s0{0.5, barenblatt_field(b, g, 0.5)};
  const PmeState same = pme_solve_to(s0, p, 0.5);
  CHECK(same.t == 0.5);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(same.rho[i] == s0.rho[i]);

  std::size_t steps = 0;
  const PmeState end = pme_solve_to(s0, p, 1.0, [&](const PmeState&, double) { ++steps; });
  CHECK(end.t == 1.0);
  CHECK(steps > 10);
  CHECK(l1_rel(end.rho, barenblatt_field(b, g, 1.0)) <= 2e-2);
  CHECK(std::abs(integrate(end.rho) - integrate(s0.rho)) <= 1e-12 * integrate(s0.rho));
  CHECK_THROWS_AS(pme_solve_to(s0, p, 0.4), ValidationError);
}

TEST_CASE("pme_solve_path") {
  const PhysParams p = PhysParams::make(1.5, 2.0, 0.0);
  const Grid g = make_grid(-8.0, 8.0, 256);
  const PmeState s0{0.0, Field::from_function(g, [](double x) { return std::max(0.0, 1 - std::abs(x)); })};
  const std::vector<double> times = {0.0, 0.1, 0.25};
  const auto path = pme_solve_path(s0, p, times);
  REQUIRE(path.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(path[k].t == times[k]);
  const PmeState direct = pme_solve_to(pme_solve_to(s0, p, 0.1), p, 0.25);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(path[2].rho[i] == direct.rho[i]);

  const std::vector<double> unsorted = {0.2, 0.1};
  CHECK_THROWS_AS(pme_solve_path(s0, p, unsorted), ValidationError);
  const std::vector<double> early = {-0.1};
  CHECK_THROWS_AS(pme_solve_path(s0, p, early), ValidationError);

  const PmeStepRule zero = [](const PmeState&) { return 0.0; };
  CHECK_THROWS_AS(pme_solve_path(s0, p, times, zero), SolverError);
  const PmeStepRule fixed = [](const PmeState&) { return 1e-3; };
  std::size_t steps = 0;
  pme_solve_path(s0, p, times, fixed, [&](const PmeState&, double) { ++steps; });
  CHECK(steps == 250);
}

TEST_CASE("support reaching the boundary margin is a solver error") {
  const PhysParams p = PhysParams::make(2.0, 2.0, 0.0, 1.0);
  const Grid g = make_grid(-3.0, 3.0, 128);
  const PmeState s0{0.0, Field::from_function(g, [](double x) { return std::max(0.0, 4 - x * x); })};
  CHECK_THROWS_AS(pme_solve_to(s0, p, 5.0), SolverError);
}

TEST_CASE("smoothing decay of the maximum") {
  const PhysParams p = PhysParams::make(2.0, 2.0, 0.0);
  const BarenblattParams b = barenblatt_params(2.0, 1.0, p.pme_coeff);
  const Grid g = make_grid(-8.0, 8.0, 512);
  const std::vector<double> times = {1.0, 4.0};
  const auto path = pme_solve_path(PmeState{0.5, barenblatt_field(b, g, 0.5)}, p, times);
  const double slope = std::log(max_value(path[1].rho) / max_value(path[0].rho)) / std::log(4.0);
  CHECK(slope == doctest::Approx(-1.0 / 3.0).epsilon(0.15));
}

TEST_CASE("property: monotone scheme structure on random data") {
  testgen::Gen gen;
  const Grid g = make_grid(-4.0, 4.0, 128);
  for (int trial = 0; trial < 20; ++trial) {
    const PhysParams p = PhysParams::make(gen.uniform(1.1, 2.5), 2.0, 0.0);
    const Field a0 = gen.bumps(g), b0 = gen.bumps(g);
    const Field upper0 = a0 + b0;  // >= a0 pointwise
    const double dt = kPmeCfl * std::min(pme_stable_dt(PmeState{0, upper0}, p),
                                         pme_stable_dt(PmeState{0, b0}, p));
    PmeState a{0, a0}, b{0, b0}, up{0, upper0};
    double l1_prev = lp_norm(a0 - b0, 1.0);
    for (int step = 0; step < 200; ++step) {
      const auto [lo, hi] = positive_range(a.rho);
      double clipped = -1.0;
      a = pme_step(a, p, dt, &clipped);
      b = pme_step(b, p, dt);
      up = pme_step(up, p, dt);
      CHECK(clipped == 0.0);
      const auto [lo2, hi2] = positive_range(a.rho);
      CHECK(lo2 + 1 >= lo);  // finite propagation: at most one cell per step
      CHECK(hi2 <= hi + 1);
      const double l1 = lp_norm(a.rho - b.rho, 1.0);
      CHECK(l1 <= l1_prev + 1e-12);
      l1_prev = l1;
    }
    CHECK(min_value(up.rho - a.rho) >= -1e-12);
    CHECK(max_value(a.rho) <= max_value(a0) + 1e-12);
    CHECK(min_value(a.rho) >= 0.0);
    CHECK(std::abs(integrate(a.rho) - integrate(a0)) <= 1e-12 * integrate(a0));
  }
}

TEST_CASE("property: scaling symmetry rho -> lambda rho, dt -> dt lambda^{1-alpha}") {
  testgen::Gen gen(testgen::kSeed + 1);
  const Grid g = make_grid(-4.0, 4.0, 128);
  for (int trial = 0; trial < 20; ++trial) {
    const double alpha = gen.uniform(1.1, 3.0), lambda = gen.uniform(0.2, 5.0);
    const PhysParams p = PhysParams::make(alpha, 2.0, 0.0);
    const PmeState s{0, gen.bumps(g)};
    const double dt = 0.3 * pme_stable_dt(s, p);
    const PmeState one = pme_step(s, p, dt);
    const PmeState scaled = pme_step(PmeState{0, lambda * s.rho}, p, dt * std::pow(lambda, 1 - alpha));
    CHECK(lp_norm(scaled.rho - lambda * one.rho, kInfinityNorm) <=
          1e-12 * lambda * max_value(one.rho));
  }
}
