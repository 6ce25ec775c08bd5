#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace hicomp {

/// Uniform cell-centered mesh on [x_min, x_max].
class Grid {
 public:
  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  int n_cells() const noexcept { return n_cells_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_cells_); }
  double dx() const noexcept { return dx_; }
  double length() const noexcept { return x_max_ - x_min_; }

  /// Center of cell i: x_min + (i + 1/2) dx.
  double center(std::size_t i) const noexcept {
    return x_min_ + (static_cast<double>(i) + 0.5) * dx_;
  }

  bool operator==(const Grid&) const = default;

 private:
  friend Grid make_grid(double x_min, double x_max, int n_cells);
  Grid(double x_min, double x_max, int n_cells)
      : x_min_(x_min), x_max_(x_max), n_cells_(n_cells),
        dx_((x_max - x_min) / n_cells) {}

  double x_min_;
  double x_max_;
  int n_cells_;
  double dx_;
};

inline constexpr int kMinCells = 4;

/// Throws ValidationError on non-finite or inverted bounds and n_cells < 4.
Grid make_grid(double x_min, double x_max, int n_cells);

/// Real-valued cell averages on a grid. Values are always finite.
class Field {
 public:
  /// Throws ValidationError if the length does not match or a value is not finite.
  Field(const Grid& grid, std::vector<double> values);

  static Field zeros(const Grid& grid);
  static Field constant(const Grid& grid, double value);

  /// Samples f at the cell centers.
  template <class F>
  static Field from_function(const Grid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.center(i));
    return Field(grid, std::move(v));
  }

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double c);

 private:
  Grid grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double c, Field f);

/// Throws ValidationError when the two fields live on different grids.
void require_same_grid(const Field& a, const Field& b, const char* what);

/// Second-order central differences inside, second-order one-sided at the two end cells.
Field derivative(const Field& f);

/// Midpoint rule: dx * sum(values).
double integrate(const Field& f);

/// Cumulative sum Phi_i = dx * sum_{j<=i} f_j, anchored at zero left of x_min.
Field antiderivative(const Field& f);

inline constexpr double kInfinityNorm = std::numeric_limits<double>::infinity();

/// Discrete L^p norm; pass kInfinityNorm for the max norm. Rejects p < 1.
double lp_norm(const Field& f, double p);

double max_value(const Field& f);
double min_value(const Field& f);

/// Throws SolverError if a cell within `margin_fraction` of the domain length from
/// either boundary carries a value above rel_threshold * max(f).
void check_support_margin(const Field& f, double rel_threshold,
                          double margin_fraction = 0.1);

}  // namespace hicomp
