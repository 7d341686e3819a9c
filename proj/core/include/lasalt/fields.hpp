#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "lasalt/errors.hpp"
#include "lasalt/grid.hpp"

namespace lasalt {

/// Real scalar field on the torus grid; houses theta, omega, their
/// expectations, stream functions, pressures and scalar moments.
struct ScalarField {
  GridPtr grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(GridPtr g) : grid(std::move(g)), v(grid->size(), 0.0) {}

  double& at(int i, int j) { return v[std::size_t(j) * grid->n() + i]; }
  double at(int i, int j) const { return v[std::size_t(j) * grid->n() + i]; }

  void fill(double c) { v.assign(v.size(), c); }
  void axpy(double a, const ScalarField& x) {
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += a * x.v[k];
  }
  void scale(double a) {
    for (double& e : v) e *= a;
  }
};

/// Two-component field with vector-field semantics (xi_k, E[u] as velocity).
struct VectorField {
  GridPtr grid;
  std::array<std::vector<double>, 2> c;

  VectorField() = default;
  explicit VectorField(GridPtr g) : grid(std::move(g)) {
    c[0].assign(grid->size(), 0.0);
    c[1].assign(grid->size(), 0.0);
  }

  void fill(double a) {
    c[0].assign(c[0].size(), a);
    c[1].assign(c[1].size(), a);
  }
  void axpy(double a, const VectorField& x) {
    for (int d = 0; d < 2; ++d)
      for (std::size_t k = 0; k < c[d].size(); ++k) c[d][k] += a * x.c[d][k];
  }
  void scale(double a) {
    for (int d = 0; d < 2; ++d)
      for (double& e : c[d]) e *= a;
  }
};

/// Two-component field with one-form semantics (circulation one-form u,
/// exterior derivatives). Same storage as VectorField, distinct type so the
/// Lie-derivative overloads cannot be mixed up.
struct OneFormField {
  GridPtr grid;
  std::array<std::vector<double>, 2> c;

  OneFormField() = default;
  explicit OneFormField(GridPtr g) : grid(std::move(g)) {
    c[0].assign(grid->size(), 0.0);
    c[1].assign(grid->size(), 0.0);
  }

  void fill(double a) {
    c[0].assign(c[0].size(), a);
    c[1].assign(c[1].size(), a);
  }
  void axpy(double a, const OneFormField& x) {
    for (int d = 0; d < 2; ++d)
      for (std::size_t k = 0; k < c[d].size(); ++k) c[d][k] += a * x.c[d][k];
  }
  void scale(double a) {
    for (int d = 0; d < 2; ++d)
      for (double& e : c[d]) e *= a;
  }
};

/// Rank-2 covariant tensor field, components row-major: c[2*i+j] holds T_ij.
/// The symmetric flag is advisory metadata.
struct Tensor2Field {
  GridPtr grid;
  std::array<std::vector<double>, 4> c;
  bool symmetric = false;

  Tensor2Field() = default;
  explicit Tensor2Field(GridPtr g, bool sym = false)
      : grid(std::move(g)), symmetric(sym) {
    for (auto& comp : c) comp.assign(grid->size(), 0.0);
  }

  std::vector<double>& comp(int i, int j) { return c[2 * i + j]; }
  const std::vector<double>& comp(int i, int j) const { return c[2 * i + j]; }

  void fill(double a) {
    for (auto& comp : c) comp.assign(comp.size(), a);
  }
  void axpy(double a, const Tensor2Field& x) {
    for (int d = 0; d < 4; ++d)
      for (std::size_t k = 0; k < c[d].size(); ++k) c[d][k] += a * x.c[d][k];
  }
  void scale(double a) {
    for (int d = 0; d < 4; ++d)
      for (double& e : c[d]) e *= a;
  }
};

/// Spatially constant vector; houses the mean velocity.
struct ConstantVector {
  double x = 0.0;
  double y = 0.0;
};

inline void check_same_grid(const GridPtr& a, const GridPtr& b) {
  if (a.get() != b.get() &&
      (!a || !b || a->n() != b->n() || a->length() != b->length()))
    throw GridMismatch("fields live on different grids");
}

inline OneFormField as_oneform(const VectorField& v) {
  OneFormField a(v.grid);
  a.c = v.c;
  return a;
}

inline VectorField as_vector(const OneFormField& a) {
  VectorField v(a.grid);
  v.c = a.c;
  return v;
}

}  // namespace lasalt
