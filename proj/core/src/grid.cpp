#include "hicomp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hicomp/error.hpp"

namespace hicomp {

Grid make_grid(double x_min, double x_max, int n_cells) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw ValidationError("grid bounds must be finite");
  }
  if (!(x_min < x_max)) {
    std::ostringstream msg;
    msg << "grid bounds inverted: x_min=" << x_min << " >= x_max=" << x_max;
    throw ValidationError(msg.str());
  }
  if (n_cells < kMinCells) {
    throw ValidationError("grid needs at least 4 cells, got " + std::to_string(n_cells));
  }
  return Grid(x_min, x_max, n_cells);
}

Field::Field(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw ValidationError("field length " + std::to_string(values_.size()) +
                          " does not match grid size " + std::to_string(grid_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ValidationError("non-finite field value at cell " + std::to_string(i));
    }
  }
}

Field Field::zeros(const Grid& grid) { return constant(grid, 0.0); }

Field Field::constant(const Grid& grid, double value) {
  return Field(grid, std::vector<double>(grid.size(), value));
}

void require_same_grid(const Field& a, const Field& b, const char* what) {
  if (!(a.grid() == b.grid())) {
    throw ValidationError(std::string(what) + ": fields live on different grids");
  }
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(*this, other, "field addition");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(*this, other, "field subtraction");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double c, Field f) { return f *= c; }

Field derivative(const Field& f) {
  const auto v = f.values();
  const std::size_t n = v.size();
  const double inv2dx = 1.0 / (2.0 * f.grid().dx());
  std::vector<double> d(n);
  // Difference form of the one-sided stencils: exactly zero on constants.
  d[0] = (4.0 * (v[1] - v[0]) - (v[2] - v[0])) * inv2dx;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) * inv2dx;
  d[n - 1] = (4.0 * (v[n - 1] - v[n - 2]) - (v[n - 1] - v[n - 3])) * inv2dx;
  return Field(f.grid(), std::move(d));
}

double integrate(const Field& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return f.grid().dx() * sum;
}

Field antiderivative(const Field& f) {
  const double dx = f.grid().dx();
  std::vector<double> phi(f.size());
  double running = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    running += f[i];
    phi[i] = dx * running;
  }
  return Field(f.grid(), std::move(phi));
}

double lp_norm(const Field& f, double p) {
  if (std::isinf(p) && p > 0) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  if (!(p >= 1.0)) {
    throw ValidationError("lp_norm requires p >= 1");
  }
  double sum = 0.0;
  if (p == 1.0) {
    for (double v : f.values()) sum += std::abs(v);
    return f.grid().dx() * sum;
  }
  if (p == 2.0) {
    for (double v : f.values()) sum += v * v;
    return std::sqrt(f.grid().dx() * sum);
  }
  for (double v : f.values()) sum += std::pow(std::abs(v), p);
  return std::pow(f.grid().dx() * sum, 1.0 / p);
}

double max_value(const Field& f) {
  return *std::max_element(f.values().begin(), f.values().end());
}

double min_value(const Field& f) {
  return *std::min_element(f.values().begin(), f.values().end());
}

void check_support_margin(const Field& f, double rel_threshold, double margin_fraction) {
  const Grid& g = f.grid();
  const double level = rel_threshold * max_value(f);
  const double margin = margin_fraction * g.length();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = g.center(i);
    const bool near_edge = (x - g.x_min() < margin) || (g.x_max() - x < margin);
    if (near_edge && f[i] > level) {
      std::ostringstream msg;
      msg << "support reached the boundary margin at x=" << x
          << " (value " << f[i] << " above " << level << "); enlarge the domain";
      throw SolverError(msg.str());
    }
  }
}

}  // namespace hicomp
