#pragma once
#include "hrf/geometry.hpp"
#include <vector>

namespace hrf {

// Generalized symmetric pencil (a K + diag(V m)) f = lambda M f in flux form,
// kept matrix-free: lc carries the stencil coefficients, diagA the operator
// diagonal for Jacobi preconditioning.
struct SpectralOperator {
    const Grid* gr = nullptr;
    LapCoeffs lc;
    Field V;       // empty means no potential term
    double a = 1.0;
    Field diagA;
};

SpectralOperator assemble(const Grid&, const Metric& g, const Field* V, double a);

// y = (a K + diag(V m)) x
void op_apply(const SpectralOperator&, const Field& x, Field& y);

// (f' A f) / (f' M f)
double rayleigh(const SpectralOperator&, const Field& f);

struct EigenPair {
    double value = 0.0;
    Field f;               // normalized so sum f^2 m = 1, node-sum >= 0
    double residual = 0.0; // mass-weighted norm of (A f - lambda M f) / m
    int iterations = 0;    // outer inverse-iteration count
};

struct EigOptions {
    int k = 1;
    bool deflate_constants = false;
    double tol = 1e-9;
    int max_iters = 10000;
    std::vector<const Field*> warm;  // optional start vectors, one per pair
};

// Smallest eigenpairs by shift-and-invert iteration with CG inner solves.
// Shift is min(V) - 1 when a potential is present, 0 with constant deflation
// otherwise.  Degenerate clusters come out as an M-orthonormal basis.
std::vector<EigenPair> smallest_eigs(const SpectralOperator&, const EigOptions&);
std::vector<EigenPair> smallest_eigs(const SpectralOperator&, int k, bool deflate_constants);

// Rate of change of a Laplace-Beltrami eigenvalue when the metric and map
// move with the coupled flow: (lambda I1 - I2 + 2 I3) / int f^2 dV with
// I1 = int S f^2, I2 = int S |grad f|^2, I3 = int <St, df x df>.
// (lambda, f) must be an eigenpair of -Lap_g with mass residual <= 1e-6.
double lambda_dot_laplacian(const Grid&, const Metric& g, const Field& u,
                            double lambda, const Field& f);

// Two independently derived expressions for the rate of the ground-state
// eigenvalue of -Lap + (R - 2|grad u|^2)/2; they agree up to O(h^2).
// f must be the strictly positive ground state with int f^2 dV = 1.
void lambda_dot_guc(const Grid&, const Metric& g, const Field& u, const Field& f,
                    double& rateA, double& rateB);

}  // namespace hrf
