#pragma once
#include <vector>
#include <cmath>
#include <cstddef>

namespace hrf {

using Field = std::vector<double>;

// Uniform periodic grid on [0,Lx) x [0,Ly).  Node (i,j) sits at
// (i*hx, j*hy) and is stored at index j*nx + i (x fastest).
struct Grid {
    int nx = 0, ny = 0;
    double Lx = 1.0, Ly = 1.0;
    double hx = 0.0, hy = 0.0;

    Grid() = default;
    Grid(int nx_, int ny_, double Lx_ = 1.0, double Ly_ = 1.0)
        : nx(nx_), ny(ny_), Lx(Lx_), Ly(Ly_), hx(Lx_ / nx_), hy(Ly_ / ny_) {}

    int n() const { return nx * ny; }
    int id(int i, int j) const { return j * nx + i; }
    double x(int i) const { return i * hx; }
    double y(int j) const { return j * hy; }

    int xp(int i) const { return i + 1 == nx ? 0 : i + 1; }
    int xm(int i) const { return i == 0 ? nx - 1 : i - 1; }
    int yp(int j) const { return j + 1 == ny ? 0 : j + 1; }
    int ym(int j) const { return j == 0 ? ny - 1 : j - 1; }

    Field field(double v = 0.0) const { return Field(n(), v); }
};

// Symmetric 2-tensor field (metric, Ricci, perturbation...).
struct Metric {
    Field a11, a12, a22;

    Metric() = default;
    explicit Metric(const Grid& g, double d11 = 1.0, double d12 = 0.0, double d22 = 1.0)
        : a11(g.field(d11)), a12(g.field(d12)), a22(g.field(d22)) {}

    std::size_t size() const { return a11.size(); }
};

// Christoffel symbols c[k][s]: upper index k in {0,1}, symmetric pair
// s in {00 -> 0, 01 -> 1, 11 -> 2}.
struct Christoffel {
    Field c[2][3];
    explicit Christoffel(const Grid& g) {
        for (int k = 0; k < 2; k++)
            for (int s = 0; s < 3; s++) c[k][s] = g.field();
    }
};

inline int sym_idx(int i, int j) { return i + j; }  // 00->0, 01/10->1, 11->2

// Centered first and second differences at node (i,j) of field f.
// These helpers are for sparse call sites; bulk kernels inline the
// index arithmetic directly.
inline double dxc(const Grid& g, const Field& f, int i, int j) {
    return (f[g.id(g.xp(i), j)] - f[g.id(g.xm(i), j)]) / (2.0 * g.hx);
}
inline double dyc(const Grid& g, const Field& f, int i, int j) {
    return (f[g.id(i, g.yp(j))] - f[g.id(i, g.ym(j))]) / (2.0 * g.hy);
}
inline double dc(const Grid& g, const Field& f, int axis, int i, int j) {
    return axis == 0 ? dxc(g, f, i, j) : dyc(g, f, i, j);
}

}  // namespace hrf
