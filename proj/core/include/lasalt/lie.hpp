#pragma once

#include <vector>

#include "lasalt/ops.hpp"

namespace lasalt {

// Lie derivative along xi for each tensor type. Local expressions:
//   scalars:   xi . grad f
//   vectors:   xi . grad v - v . grad xi   ( = [xi, v] )
//   one-forms: (xi . grad a)_i + a_j d_i xi^j
//   rank-2:    xi . grad T_ij + T_kj d_i xi^k + T_ik d_j xi^k
// All products are dealiased.

ScalarField lie_scalar(const VectorField& xi, const ScalarField& f);
VectorField lie_vector(const VectorField& xi, const VectorField& v);
OneFormField lie_oneform(const VectorField& xi, const OneFormField& a);
Tensor2Field lie_tensor2(const VectorField& xi, const Tensor2Field& t);

// sum_k L_{xi_k} (L_{xi_k} f)
ScalarField double_lie(const std::vector<VectorField>& xis,
                       const ScalarField& f);
VectorField double_lie(const std::vector<VectorField>& xis,
                       const VectorField& f);
OneFormField double_lie(const std::vector<VectorField>& xis,
                        const OneFormField& f);
Tensor2Field double_lie(const std::vector<VectorField>& xis,
                        const Tensor2Field& f);

}  // namespace lasalt
