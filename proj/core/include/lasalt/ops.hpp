#pragma once

#include "lasalt/fields.hpp"

namespace lasalt {

// Spectral differential operators. All are total on finite fields; products
// go through the 2/3-rule dealias mask.

OneFormField gradient(const ScalarField& f);
/// Same numerics as gradient; kept as a distinct entry point because df is a
/// one-form in the moment equations.
OneFormField exterior_d(const ScalarField& f);
ScalarField deriv(const ScalarField& f, int axis);

ScalarField divergence(const VectorField& v);
/// curl v = d_x v2 - d_y v1.
ScalarField curl2d(const VectorField& v);

/// K omega = (d_y, -d_x) (-Laplace)^{-1} omega, the divergence-free inversion
/// oriented so that curl2d(biot_savart(w)) == w on mean-free fields.
VectorField biot_savart(const ScalarField& omega);

/// Mean-free solution of -Laplace p = src.
ScalarField poisson_solve(const ScalarField& src);

ScalarField dealias_product(const ScalarField& f, const ScalarField& g);
void dealias_inplace(ScalarField& f);
void dealias_inplace(VectorField& f);
void dealias_inplace(OneFormField& f);

double mean(const ScalarField& f);
void subtract_mean(ScalarField& f);
ConstantVector mean(const VectorField& v);
ConstantVector mean(const OneFormField& v);

// Grid-sum norms, scaled so that l2_norm approximates the continuum L2 norm.
double l2_norm(const ScalarField& f);
double l2_norm(const OneFormField& f);
double l2_norm(const VectorField& f);
double l2_norm(const Tensor2Field& f);
double linf_norm(const ScalarField& f);
double linf_norm(const OneFormField& f);
double linf_norm(const VectorField& f);
double linf_norm(const Tensor2Field& f);
double rel_l2_error(const ScalarField& a, const ScalarField& b);

/// Spectral Sobolev H^k norm (sum over orders 0..k of derivative energies).
double sobolev_norm(const ScalarField& f, int k);
double sobolev_norm(const VectorField& f, int k);

/// Integral over the torus (grid quadrature, exact for band-limited fields).
double integral(const ScalarField& f);

bool all_finite(const ScalarField& f);

}  // namespace lasalt
