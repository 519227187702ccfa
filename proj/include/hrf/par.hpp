#pragma once
#include <cstddef>
#include "hrf/grid.hpp"

namespace hrf {

// Thread count comes from HRF_THREADS; unset means single-threaded.
// Call once at program start.
void init_threads();
int thread_count();

// Deterministic reductions: fixed blocked pairwise tree, independent of
// thread count.  Blocks of 64 are summed sequentially, block partials are
// combined by a pairwise tree.  Same result bit for bit however many
// threads computed the inputs.
double det_sum(const double* x, std::size_t n);
double det_sum(const Field& x);
double det_dot(const double* a, const double* b, std::size_t n);
double det_dot(const Field& a, const Field& b);
double det_max(const double* x, std::size_t n);
double det_max(const Field& x);
double det_min(const double* x, std::size_t n);
double det_min(const Field& x);

}  // namespace hrf
