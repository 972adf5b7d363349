#pragma once

#include <cstddef>
#include <vector>

namespace fplab {

// Nodal values on the interior cells of a Grid1D; the exterior is
// identically zero and never stored.
struct Field {
  std::vector<double> values;

  Field() = default;
  explicit Field(std::size_t n, double fill = 0.0) : values(n, fill) {}

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  double* data() { return values.data(); }
  const double* data() const { return values.data(); }
  auto begin() { return values.begin(); }
  auto begin() const { return values.begin(); }
  auto end() { return values.end(); }
  auto end() const { return values.end(); }
};

double linf(const Field& v);
double l1_h(const Field& v, double h);
double l2_h(const Field& v, double h);
// sum_i |v_i|^r * h
double power_sum(const Field& v, double r, double h);
bool all_finite(const Field& v);

}  // namespace fplab
