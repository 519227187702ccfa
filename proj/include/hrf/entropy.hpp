#pragma once
#include "hrf/geometry.hpp"
#include <vector>

namespace hrf {

// Weighted-energy functionals over e^{-f} dV and their constrained infima.
// The |grad f|^2 and lap f terms are always evaluated through the Dirichlet
// form of e^{-f/2}, which makes the algebraic relations between the family
// members and the eigenvalue infima hold to round-off.

double functional_E(const Grid&, const Metric& g, const Field& u, const Field& f,
                    bool rescale = false);
double functional_F(const Grid&, const Metric& g, const Field& u, const Field& f,
                    bool rescale = false);
double functional_F_k(const Grid&, const Metric& g, const Field& u, const Field& f,
                      double k, bool rescale = false);

// Smallest eigenvalue of -4 Lap + k (R - 2|grad u|^2); optional ground-state
// output (normalized, positive) and warm start.
double mu_k(const Grid&, const Metric& g, const Field& u, double k,
            Field* ground = nullptr, const Field* warm = nullptr);

// tau^2 * int (k(R + n/(2 tau)) + lap f - 2k|grad u|^2) e^{-f} dV
double W_plus_family(const Grid&, const Metric& g, const Field& u, const Field& f,
                     double tau, double k, bool rescale = false);

// Infimum of the above over normalized f: tau^2 mu_k + (k n / 2) tau.
double mu_plus(const Grid&, const Metric& g, const Field& u, double tau, double k,
               const Field* warm = nullptr, Field* ground = nullptr);

// Cross-check of mu_plus by projected gradient descent instead of the
// eigensolver.
double mu_plus_direct(const Grid&, const Metric& g, const Field& u, double tau,
                      double k, int max_iters = 40000, double tol = 1e-9);

// int [tau(S + |grad f|^2) -+ f +- n] e^{-f} / (4 pi tau)^{n/2} dV,
// sign = +1 or -1; requires int e^{-f} dV / (4 pi tau)^{n/2} = 1.
double W_pm(const Grid&, const Metric& g, const Field& u, const Field& f,
            double tau, int sign, bool rescale = false);

// Same value in the substitution variable w with w^2 = e^{-f}/(4 pi tau)^{n/2}:
// 4 tau B(w,w) + sum (tau S + sign 2 ln w) w^2 m + c(tau) sum w^2 m.
double W_pm_wform(const Grid&, const Metric& g, const Field& u, const Field& w,
                  double tau, int sign);

struct MinimizerResult {
    double value = 0.0;
    Field f_star;                // exponent variable
    Field w_star;                // substitution variable, sum w^2 m = 1
    double tau_star = 0.0;
    double grad_residual = 0.0;  // mass-weighted Euler-Lagrange residual
    double identity_gap = 0.0;   // |int f w^2 dV - (n/2 -+ value)|
    bool boundary_hit = false;
    int iterations = 0;
};

struct MinimizeOptions {
    double tol = 1e-7;  // target for the projected-gradient norm
    int max_iters = 40000;
    const Field* w0 = nullptr;
};

// Fixed-tau minimization of W_pm over the constraint sum w^2 m = 1 by
// projected descent along an inexact-Newton direction with backtracking;
// the start vector defaults to the ground state of the linear part.
MinimizerResult mu_pm(const Grid&, const Metric& g, const Field& u, double tau,
                      int sign, const MinimizeOptions& = MinimizeOptions{});

struct TauSearchOptions {
    double tau_lo = 1e-2;
    double tau_hi = 1e2;
    double xtol_log = 1e-8;
    MinimizeOptions inner;
};

// Golden-section search of mu_pm over log tau; boundary_hit set when an
// endpoint value undercuts the interior optimum.
MinimizerResult nu_pm(const Grid&, const Metric& g, const Field& u, int sign,
                      const TauSearchOptions& = TauSearchOptions{});

}  // namespace hrf
