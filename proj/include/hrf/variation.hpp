#pragma once
#include "hrf/entropy.hpp"
#include "hrf/geometry.hpp"

namespace hrf {

// delta R[h] = -h^{ij} R_ij + div div h - lap_g tr_g h, assembled through
// the linearized Christoffel symbols with the same centered stencils as the
// curvature itself, so it matches central differences of the discrete R at
// second order in the step.
void linearized_scalar_curvature(const Grid&, const Metric& g, const Metric& h,
                                 Field& out);

// First variation of the optimal-tau entropy value at its minimizer in the
// direction (h, v).  Assembled as the algebraic derivative of the discrete
// functional at the frozen (w*, tau*): the metric variation enters through
// the stiffness coefficients sqrt(det g) g^{ij}, the mass weights, and the
// coupled curvature, and the constraint multiplier removes the normalization
// component.  Equals d/ds of the branch-tracked re-minimized value at s = 0
// up to O(s^2), and discretizes
//   -tau int (<h,St> + <h,hess f> +- tr_g h/(2 tau)) rho dV
//     + 4 tau int v (lap u - <grad u, grad f>) rho dV
// with rho = e^{-f}/(4 pi tau)^{n/2}.  base must come from nu_pm with an
// interior tau*.
double nu_first_variation(const Grid&, const Metric& g, const Field& u,
                          const Metric& h, const Field& v,
                          const MinimizerResult& base, int sign);

// Same variation assembled from the pointwise stationarity form: the
// displayed integrand above evaluated node by node with hess f and grad f
// from centered stencils.  Differs from nu_first_variation by the quadrature
// commutator, which shrinks at second order under grid refinement; kept as
// an independent cross-check of the integrand.
double nu_first_variation_stationary(const Grid&, const Metric& g, const Field& u,
                                     const Metric& h, const Field& v,
                                     const MinimizerResult& base, int sign);

// int (div div h - lap_g tr_g h) dV assembled in flux form, so the
// divergence structure telescopes over the periodic grid and the result is
// zero to round-off for any g and h.
double divergence_structure_integral(const Grid&, const Metric& g, const Metric& h);

// Stationarity residuals of the fixed-tau minimization at exponent f:
// eq1 = weighted norm of tau(-2 lap f + |grad f|^2 - S) +- f -+ n + nu over
// rho dV; eq2 = |int f rho dV - (n/2 -+ nu)|.  The second-order terms are
// evaluated through the substitution w = e^{-f/2}(4 pi tau)^{-n/4}, the same
// quadrature the minimizer is stationary under.
void euler_lagrange_residual(const Grid&, const Metric& g, const Field& u,
                             const Field& f, double tau, double nu, int sign,
                             double& eq1, double& eq2);

// Steady coupled-soliton residuals: max-node |St + hess f + c g|_g and
// max-node |lap u - <grad u, grad f>|.
void soliton_residual(const Grid&, const Metric& g, const Field& u,
                      const Field& f, double c,
                      double& tensor_norm, double& scalar_norm);

}  // namespace hrf
