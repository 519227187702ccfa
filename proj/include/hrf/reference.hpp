#pragma once
// Plain serial reference implementations with full (unpacked) tensor loops.
// Used by tests to cross-check the parallel kernels and by the benchmark.
#include "hrf/grid.hpp"

namespace hrf {
namespace ref {

Field dx(const Grid& g, const Field& f);
Field dy(const Grid& g, const Field& f);
Field dxx(const Grid& g, const Field& f);
Field dyy(const Grid& g, const Field& f);
Field dxy(const Grid& g, const Field& f);

void metric_inverse(const Grid& g, const Metric& m, Metric& inv, Field& det, Field& sq);

// gam[k][i][j], full 2x2x2 per node
void christoffel_full(const Grid& g, const Metric& m, const Metric& inv, Field gam[2][2][2]);

// rm[k][i][j][l] = Rm^k_{ijl}, full 2x2x2x2 per node
void riemann_full(const Grid& g, const Field gam[2][2][2], Field rm[2][2][2][2]);

void ricci(const Grid& g, const Field rm[2][2][2][2], const Metric& inv, Metric& ric, Field& R);

Field laplace_beltrami(const Grid& g, const Metric& m, const Field& f);
double dirichlet(const Grid& g, const Metric& m, const Field& f, const Field& q);
void hessian(const Grid& g, const Metric& m, const Field& f, Metric& out);
Field grad2(const Grid& g, const Metric& m, const Field& u);
double integrate(const Grid& g, const Metric& m, const Field& f);

}  // namespace ref
}  // namespace hrf
