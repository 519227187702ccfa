#pragma once
#include "hrf/grid.hpp"

namespace hrf {

// All operators use centered second-order stencils on the periodic grid.
// The Riemann tensor is antisymmetric in its first two lower indices at
// the discrete level (it is built from centered derivatives of the
// Christoffel field), so only the slice Rm^k_{01l} is stored.

struct Geometry {
    Metric inv;      // g^{11}, g^{12}, g^{22}
    Field det, sq;   // det g, sqrt(det g)
    Christoffel gam;
    Field rm[4];     // Rm^k_{01l} at index k*2 + l
    Metric ric;      // symmetrized Ricci
    Field R;         // scalar curvature

    explicit Geometry(const Grid& g)
        : inv(g), det(g.field()), sq(g.field()), gam(g),
          rm{g.field(), g.field(), g.field(), g.field()}, ric(g), R(g.field()) {}
};

void metric_inverse(const Grid&, const Metric& g, Metric& inv, Field& det, Field& sq);
void christoffel(const Grid&, const Metric& g, const Metric& inv, Christoffel& out);
void riemann_slice(const Grid&, const Christoffel&, Field rm[4]);
void ricci_from_riemann(const Grid&, const Metric& inv, const Field rm[4], Metric& ric, Field& R);
Geometry compute_geometry(const Grid&, const Metric& g);

// Coefficients a^{ij} = sqrt(det g) g^{ij} of the divergence-form Laplacian.
struct LapCoeffs {
    Field f11;  // face average of a^{11} at (i+1/2, j)
    Field f22;  // face average of a^{22} at (i, j+1/2)
    Field a12;  // node value of a^{12}
    Field sq;   // sqrt(det g) at nodes
    Field mass; // sqrt(det g) * hx * hy
};
LapCoeffs lap_coeffs(const Grid&, const Metric& inv, const Field& sq);

// Flux-form Laplace-Beltrami: axis terms with face-averaged coefficients,
// cross terms with centered differences.
void laplace_beltrami(const Grid&, const LapCoeffs&, const Field& f, Field& out);

// Stiffness K f = -hx*hy*(flux divergence); symmetric, K 1 = 0 exactly.
void stiffness_apply(const Grid&, const LapCoeffs&, const Field& f, Field& out);

// Dirichlet form B(f,q) = f^T K q assembled as a face sum.
double dirichlet_form(const Grid&, const LapCoeffs&, const Field& f, const Field& q);

// Hessian of a scalar: H_ij = d_i d_j f - Gamma^k_ij d_k f.
void hessian(const Grid&, const Christoffel&, const Field& f, Metric& out);

// |grad u|^2 = g^{ij} u_i u_j
void gradient_squared(const Grid&, const Metric& inv, const Field& u, Field& out);

// Curvature-map coupling: St_ij = Ric_ij - 2 u_i u_j and S = R - 2|grad u|^2.
void coupled_curvature(const Grid&, const Geometry&, const Field& u, Metric& St, Field& S);
void coupled_scalar(const Grid&, const Geometry&, const Field& u, Field& S);

// Covariant derivative of a symmetric 2-tensor: out[q] holds nabla_q h.
void cov_deriv_sym2(const Grid&, const Christoffel&, const Metric& h, Metric out[2]);

double integrate(const Grid&, const Field& sq, const Field& f);
double volume(const Grid&, const Field& sq);

void conformal_metric(const Grid&, const Field& phi, Metric& out);  // e^{2 phi} * identity

// Pointwise norms and 2x2 eigenvalues for symmetric tensors.
void tensor_norm2(const Grid&, const Metric& inv, const Metric& T, Field& out);  // g^{ia}g^{jb}T_ij T_ab
void tensor_inner(const Grid&, const Metric& inv, const Metric& A, const Metric& B, Field& out);
// Smaller/larger eigenvalue of T relative to g (solutions of det(T - lam g) = 0).
void rel_eigenvalues(const Grid&, const Metric& g, const Metric& T, Field& lo, Field& hi);

// Canonical quadrature for weighted gradients:
// int |grad f|^2 e^{-f} dV := 4 B(e^{-f/2}, e^{-f/2}).
double weighted_grad_quadrature(const Grid&, const LapCoeffs&, const Field& f);

// Max-norm residuals of the four curvature symmetry identities: the two
// algebraic/differential ones on the full Riemann tensor (round-off level
// by construction) and the two contracted ones (O(h^2)).
struct BianchiResiduals {
    double first = 0.0, second = 0.0, contracted1 = 0.0, contracted2 = 0.0;
};
BianchiResiduals bianchi_residuals(const Grid&, const Metric& g);

}  // namespace hrf
