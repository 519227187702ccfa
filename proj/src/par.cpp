#include "hrf/par.hpp"
#include <algorithm>
#include <cstdlib>
#include <vector>
#include <omp.h>

namespace hrf {

static int g_threads = 1;

void init_threads() {
    const char* e = std::getenv("HRF_THREADS");
    g_threads = 1;
    if (e) {
        int v = std::atoi(e);
        if (v > 0) g_threads = v;
    }
    omp_set_num_threads(g_threads);
}

int thread_count() { return g_threads; }

namespace {

constexpr std::size_t kBlock = 64;

// Pairwise combine of the block partials; recursion depth is log2(m).
double pairwise(const double* p, std::size_t m) {
    if (m == 1) return p[0];
    if (m == 2) return p[0] + p[1];
    std::size_t half = m / 2;
    return pairwise(p, half) + pairwise(p + half, m - half);
}

template <class BlockOp>
double blocked_reduce(std::size_t n, BlockOp&& block) {
    if (n == 0) return 0.0;
    std::size_t m = (n + kBlock - 1) / kBlock;
    std::vector<double> part(m);
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < (long long)m; b++) {
        std::size_t lo = (std::size_t)b * kBlock;
        std::size_t hi = std::min(lo + kBlock, n);
        part[b] = block(lo, hi);
    }
    return pairwise(part.data(), m);
}

}  // namespace

double det_sum(const double* x, std::size_t n) {
    return blocked_reduce(n, [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; i++) s += x[i];
        return s;
    });
}

double det_dot(const double* a, const double* b, std::size_t n) {
    return blocked_reduce(n, [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; i++) s += a[i] * b[i];
        return s;
    });
}

double det_max(const double* x, std::size_t n) {
    double m = x[0];
    for (std::size_t i = 1; i < n; i++) m = std::max(m, x[i]);
    return m;
}

double det_min(const double* x, std::size_t n) {
    double m = x[0];
    for (std::size_t i = 1; i < n; i++) m = std::min(m, x[i]);
    return m;
}

double det_sum(const Field& x) { return det_sum(x.data(), x.size()); }
double det_dot(const Field& a, const Field& b) { return det_dot(a.data(), b.data(), a.size()); }
double det_max(const Field& x) { return det_max(x.data(), x.size()); }
double det_min(const Field& x) { return det_min(x.data(), x.size()); }

}  // namespace hrf
