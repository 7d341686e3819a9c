#include "lasalt/lie.hpp"

namespace lasalt {

namespace {

// xi . grad applied to a raw component, dealiased.
std::vector<double> advect(const VectorField& xi, const GridPtr& grid,
                           const std::vector<double>& comp) {
  const TorusGrid& g = *grid;
  auto cx = g.to_spectral(comp);
  auto cy = cx;
  g.spectral_derivative(cx.data(), 0);
  g.spectral_derivative(cy.data(), 1);
  auto dx = g.to_real(cx);
  auto dy = g.to_real(cy);
  std::vector<double> out(comp.size());
  for (std::size_t k = 0; k < comp.size(); ++k)
    out[k] = xi.c[0][k] * dx[k] + xi.c[1][k] * dy[k];
  auto oc = g.to_spectral(out);
  g.apply_dealias(oc.data());
  return g.to_real(oc);
}

std::vector<double> deriv_comp(const GridPtr& grid,
                               const std::vector<double>& comp, int axis) {
  auto c = grid->to_spectral(comp);
  grid->spectral_derivative(c.data(), axis);
  return grid->to_real(c);
}

void dealias_comp(const GridPtr& grid, std::vector<double>& comp) {
  auto c = grid->to_spectral(comp);
  grid->apply_dealias(c.data());
  comp = grid->to_real(c);
}

}  // namespace

ScalarField lie_scalar(const VectorField& xi, const ScalarField& f) {
  check_same_grid(xi.grid, f.grid);
  ScalarField out(f.grid);
  out.v = advect(xi, f.grid, f.v);
  return out;
}

VectorField lie_vector(const VectorField& xi, const VectorField& v) {
  check_same_grid(xi.grid, v.grid);
  VectorField out(v.grid);
  for (int i = 0; i < 2; ++i) {
    auto adv = advect(xi, v.grid, v.c[i]);
    // minus v . grad xi^i
    auto dxix = deriv_comp(v.grid, xi.c[i], 0);
    auto dxiy = deriv_comp(v.grid, xi.c[i], 1);
    std::vector<double> back(adv.size());
    for (std::size_t k = 0; k < adv.size(); ++k)
      back[k] = v.c[0][k] * dxix[k] + v.c[1][k] * dxiy[k];
    dealias_comp(v.grid, back);
    for (std::size_t k = 0; k < adv.size(); ++k)
      out.c[i][k] = adv[k] - back[k];
  }
  return out;
}

OneFormField lie_oneform(const VectorField& xi, const OneFormField& a) {
  check_same_grid(xi.grid, a.grid);
  OneFormField out(a.grid);
  for (int i = 0; i < 2; ++i) {
    auto adv = advect(xi, a.grid, a.c[i]);
    // plus a_j d_i xi^j
    auto dxi0 = deriv_comp(a.grid, xi.c[0], i);
    auto dxi1 = deriv_comp(a.grid, xi.c[1], i);
    std::vector<double> stretch(adv.size());
    for (std::size_t k = 0; k < adv.size(); ++k)
      stretch[k] = a.c[0][k] * dxi0[k] + a.c[1][k] * dxi1[k];
    dealias_comp(a.grid, stretch);
    for (std::size_t k = 0; k < adv.size(); ++k)
      out.c[i][k] = adv[k] + stretch[k];
  }
  return out;
}

Tensor2Field lie_tensor2(const VectorField& xi, const Tensor2Field& t) {
  check_same_grid(xi.grid, t.grid);
  Tensor2Field out(t.grid, t.symmetric);
  // grad xi, dxi[i][j] = d_i xi^j
  std::array<std::array<std::vector<double>, 2>, 2> dxi;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) dxi[i][j] = deriv_comp(t.grid, xi.c[j], i);

  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      auto adv = advect(xi, t.grid, t.comp(i, j));
      std::vector<double> stretch(adv.size(), 0.0);
      for (int k = 0; k < 2; ++k) {
        const auto& tkj = t.comp(k, j);
        const auto& tik = t.comp(i, k);
        for (std::size_t m = 0; m < adv.size(); ++m)
          stretch[m] += tkj[m] * dxi[i][k][m] + tik[m] * dxi[j][k][m];
      }
      dealias_comp(t.grid, stretch);
      auto& o = out.comp(i, j);
      for (std::size_t m = 0; m < adv.size(); ++m) o[m] = adv[m] + stretch[m];
    }
  }
  return out;
}

ScalarField double_lie(const std::vector<VectorField>& xis,
                       const ScalarField& f) {
  ScalarField acc(f.grid);
  for (const auto& xi : xis) acc.axpy(1.0, lie_scalar(xi, lie_scalar(xi, f)));
  return acc;
}

VectorField double_lie(const std::vector<VectorField>& xis,
                       const VectorField& f) {
  VectorField acc(f.grid);
  for (const auto& xi : xis) acc.axpy(1.0, lie_vector(xi, lie_vector(xi, f)));
  return acc;
}

OneFormField double_lie(const std::vector<VectorField>& xis,
                        const OneFormField& f) {
  OneFormField acc(f.grid);
  for (const auto& xi : xis) acc.axpy(1.0, lie_oneform(xi, lie_oneform(xi, f)));
  return acc;
}

Tensor2Field double_lie(const std::vector<VectorField>& xis,
                        const Tensor2Field& f) {
  Tensor2Field acc(f.grid, f.symmetric);
  for (const auto& xi : xis) acc.axpy(1.0, lie_tensor2(xi, lie_tensor2(xi, f)));
  return acc;
}

}  // namespace lasalt
