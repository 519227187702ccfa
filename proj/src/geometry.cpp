#include "hrf/geometry.hpp"
#include "hrf/par.hpp"
#include <cmath>
#include <algorithm>

namespace hrf {

namespace {
void ensure(Field& f, int n) {
    if ((int)f.size() != n) f.resize(n);
}
void ensure(Metric& m, int n) {
    ensure(m.a11, n);
    ensure(m.a12, n);
    ensure(m.a22, n);
}
}  // namespace

void metric_inverse(const Grid& g, const Metric& m, Metric& inv, Field& det, Field& sq) {
    const int n = g.n();
    ensure(inv, n);
    ensure(det, n);
    ensure(sq, n);
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) {
        double a = m.a11[id], b = m.a12[id], c = m.a22[id];
        double d = a * c - b * b;
        det[id] = d;
        sq[id] = std::sqrt(d);
        inv.a11[id] = c / d;
        inv.a12[id] = -b / d;
        inv.a22[id] = a / d;
    }
}

void christoffel(const Grid& g, const Metric& m, const Metric& inv, Christoffel& out) {
    const int n = g.n();
    for (int k = 0; k < 2; k++)
        for (int s = 0; s < 3; s++) ensure(out.c[k][s], n);
    const double ix = 1.0 / (2.0 * g.hx), iy = 1.0 / (2.0 * g.hy);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; j++) {
        int jp = g.yp(j), jm = g.ym(j);
        for (int i = 0; i < g.nx; i++) {
            int ip = g.xp(i), im = g.xm(i);
            int id = g.id(i, j);
            int ixp = g.id(ip, j), ixm = g.id(im, j);
            int iyp = g.id(i, jp), iym = g.id(i, jm);
            double d11x = (m.a11[ixp] - m.a11[ixm]) * ix;
            double d11y = (m.a11[iyp] - m.a11[iym]) * iy;
            double d12x = (m.a12[ixp] - m.a12[ixm]) * ix;
            double d12y = (m.a12[iyp] - m.a12[iym]) * iy;
            double d22x = (m.a22[ixp] - m.a22[ixm]) * ix;
            double d22y = (m.a22[iyp] - m.a22[iym]) * iy;
            // t_l = d_i g_jl + d_j g_il - d_l g_ij per symmetric pair (i,j)
            double t00_0 = d11x, t00_1 = 2.0 * d12x - d11y;
            double t01_0 = d11y, t01_1 = d22x;
            double t11_0 = 2.0 * d12y - d22x, t11_1 = d22y;
            double i11 = inv.a11[id], i12 = inv.a12[id], i22 = inv.a22[id];
            out.c[0][0][id] = 0.5 * (i11 * t00_0 + i12 * t00_1);
            out.c[0][1][id] = 0.5 * (i11 * t01_0 + i12 * t01_1);
            out.c[0][2][id] = 0.5 * (i11 * t11_0 + i12 * t11_1);
            out.c[1][0][id] = 0.5 * (i12 * t00_0 + i22 * t00_1);
            out.c[1][1][id] = 0.5 * (i12 * t01_0 + i22 * t01_1);
            out.c[1][2][id] = 0.5 * (i12 * t11_0 + i22 * t11_1);
        }
    }
}

void riemann_slice(const Grid& g, const Christoffel& gam, Field rm[4]) {
    const int n = g.n();
    for (int t = 0; t < 4; t++) ensure(rm[t], n);
    const double ix = 1.0 / (2.0 * g.hx), iy = 1.0 / (2.0 * g.hy);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; j++) {
        int jp = g.yp(j), jm = g.ym(j);
        for (int i = 0; i < g.nx; i++) {
            int ip = g.xp(i), im = g.xm(i);
            int id = g.id(i, j);
            int ixp = g.id(ip, j), ixm = g.id(im, j);
            int iyp = g.id(i, jp), iym = g.id(i, jm);
            for (int k = 0; k < 2; k++) {
                for (int l = 0; l < 2; l++) {
                    const Field& g1l = gam.c[k][sym_idx(1, l)];
                    const Field& g0l = gam.c[k][sym_idx(0, l)];
                    double s = (g1l[ixp] - g1l[ixm]) * ix - (g0l[iyp] - g0l[iym]) * iy;
                    for (int p = 0; p < 2; p++) {
                        s += gam.c[k][sym_idx(0, p)][id] * gam.c[p][sym_idx(1, l)][id]
                           - gam.c[k][sym_idx(1, p)][id] * gam.c[p][sym_idx(0, l)][id];
                    }
                    rm[k * 2 + l][id] = s;
                }
            }
        }
    }
}

void ricci_from_riemann(const Grid& g, const Metric& inv, const Field rm[4], Metric& ric, Field& R) {
    const int n = g.n();
    ensure(ric, n);
    ensure(R, n);
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) {
        // Ric_jl = Rm^k_{kjl}; with the stored slice: Ric_0l = -Rm^1_{01l},
        // Ric_1l = +Rm^0_{01l}; then symmetrize.
        double r11 = -rm[2][id];
        double r22 = rm[1][id];
        double r12 = 0.5 * (rm[0][id] - rm[3][id]);
        ric.a11[id] = r11;
        ric.a12[id] = r12;
        ric.a22[id] = r22;
        R[id] = inv.a11[id] * r11 + 2.0 * inv.a12[id] * r12 + inv.a22[id] * r22;
    }
}

Geometry compute_geometry(const Grid& g, const Metric& m) {
    Geometry geo(g);
    metric_inverse(g, m, geo.inv, geo.det, geo.sq);
    christoffel(g, m, geo.inv, geo.gam);
    riemann_slice(g, geo.gam, geo.rm);
    ricci_from_riemann(g, geo.inv, geo.rm, geo.ric, geo.R);
    return geo;
}

LapCoeffs lap_coeffs(const Grid& g, const Metric& inv, const Field& sq) {
    const int n = g.n();
    LapCoeffs lc;
    lc.f11.resize(n);
    lc.f22.resize(n);
    lc.a12.resize(n);
    lc.sq = sq;
    lc.mass.resize(n);
    const double hh = g.hx * g.hy;
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; j++) {
        int jp = g.yp(j);
        for (int i = 0; i < g.nx; i++) {
            int id = g.id(i, j);
            int ixp = g.id(g.xp(i), j);
            int iyp = g.id(i, jp);
            double a11 = sq[id] * inv.a11[id];
            double a22 = sq[id] * inv.a22[id];
            lc.f11[id] = 0.5 * (a11 + sq[ixp] * inv.a11[ixp]);
            lc.f22[id] = 0.5 * (a22 + sq[iyp] * inv.a22[iyp]);
            lc.a12[id] = sq[id] * inv.a12[id];
            lc.mass[id] = sq[id] * hh;
        }
    }
    return lc;
}

namespace {

// Scratch for the cross-term intermediate fields of the flux divergence.
thread_local Field tl_cx, tl_cy;

// flux = Dx-(f11 Dx+ f) + Dy-(f22 Dy+ f) + Dxc(a12 Dyc f) + Dyc(a12 Dxc f)
void flux_divergence(const Grid& g, const LapCoeffs& lc, const Field& f, Field& out) {
    const int n = g.n();
    ensure(out, n);
    ensure(tl_cx, n);
    ensure(tl_cy, n);
    const double ix = 1.0 / (2.0 * g.hx), iy = 1.0 / (2.0 * g.hy);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; j++) {
        int jp = g.yp(j), jm = g.ym(j);
        for (int i = 0; i < g.nx; i++) {
            int id = g.id(i, j);
            tl_cx[id] = lc.a12[id] * (f[g.id(i, jp)] - f[g.id(i, jm)]) * iy;
            tl_cy[id] = lc.a12[id] * (f[g.id(g.xp(i), j)] - f[g.id(g.xm(i), j)]) * ix;
        }
    }
    const double ihx2 = 1.0 / (g.hx * g.hx), ihy2 = 1.0 / (g.hy * g.hy);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; j++) {
        int jp = g.yp(j), jm = g.ym(j);
        for (int i = 0; i < g.nx; i++) {
            int ip = g.xp(i), im = g.xm(i);
            int id = g.id(i, j);
            int ixp = g.id(ip, j), ixm = g.id(im, j);
            int iyp = g.id(i, jp), iym = g.id(i, jm);
            double t1 = (lc.f11[id] * (f[ixp] - f[id]) - lc.f11[ixm] * (f[id] - f[ixm])) * ihx2;
            double t2 = (lc.f22[id] * (f[iyp] - f[id]) - lc.f22[iym] * (f[id] - f[iym])) * ihy2;
            double t3 = (tl_cx[ixp] - tl_cx[ixm]) * ix;
            double t4 = (tl_cy[iyp] - tl_cy[iym]) * iy;
            out[id] = t1 + t2 + t3 + t4;
        }
    }
}

}  // namespace

void laplace_beltrami(const Grid& g, const LapCoeffs& lc, const Field& f, Field& out) {
    flux_divergence(g, lc, f, out);
    const int n = g.n();
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) out[id] /= lc.sq[id];
}

void stiffness_apply(const Grid& g, const LapCoeffs& lc, const Field& f, Field& out) {
    flux_divergence(g, lc, f, out);
    const int n = g.n();
    const double hh = g.hx * g.hy;
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) out[id] = -out[id] * hh;
}

double dirichlet_form(const Grid& g, const LapCoeffs& lc, const Field& f, const Field& q) {
    const int n = g.n();
    thread_local Field acc;
    ensure(acc, n);
    const double ihx = 1.0 / g.hx, ihy = 1.0 / g.hy;
    const double ix = 1.0 / (2.0 * g.hx), iy = 1.0 / (2.0 * g.hy);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; j++) {
        int jp = g.yp(j), jm = g.ym(j);
        for (int i = 0; i < g.nx; i++) {
            int ip = g.xp(i), im = g.xm(i);
            int id = g.id(i, j);
            int ixp = g.id(ip, j), ixm = g.id(im, j);
            int iyp = g.id(i, jp), iym = g.id(i, jm);
            double fx = (f[ixp] - f[id]) * ihx, qx = (q[ixp] - q[id]) * ihx;
            double fy = (f[iyp] - f[id]) * ihy, qy = (q[iyp] - q[id]) * ihy;
            double fcx = (f[ixp] - f[ixm]) * ix, qcx = (q[ixp] - q[ixm]) * ix;
            double fcy = (f[iyp] - f[iym]) * iy, qcy = (q[iyp] - q[iym]) * iy;
            acc[id] = lc.f11[id] * fx * qx + lc.f22[id] * fy * qy
                    + lc.a12[id] * (fcx * qcy + fcy * qcx);
        }
    }
    return det_sum(acc) * g.hx * g.hy;
}

void hessian(const Grid& g, const Christoffel& gam, const Field& f, Metric& out) {
    const int n = g.n();
    ensure(out, n);
    const double ix = 1.0 / (2.0 * g.hx), iy = 1.0 / (2.0 * g.hy);
    const double ixx = 1.0 / (g.hx * g.hx), iyy = 1.0 / (g.hy * g.hy);
    const double ixy = 1.0 / (4.0 * g.hx * g.hy);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; j++) {
        int jp = g.yp(j), jm = g.ym(j);
        for (int i = 0; i < g.nx; i++) {
            int ip = g.xp(i), im = g.xm(i);
            int id = g.id(i, j);
            double fx = (f[g.id(ip, j)] - f[g.id(im, j)]) * ix;
            double fy = (f[g.id(i, jp)] - f[g.id(i, jm)]) * iy;
            double fxx = (f[g.id(ip, j)] - 2.0 * f[id] + f[g.id(im, j)]) * ixx;
            double fyy = (f[g.id(i, jp)] - 2.0 * f[id] + f[g.id(i, jm)]) * iyy;
            double fxy = (f[g.id(ip, jp)] - f[g.id(ip, jm)] - f[g.id(im, jp)] + f[g.id(im, jm)]) * ixy;
            out.a11[id] = fxx - (gam.c[0][0][id] * fx + gam.c[1][0][id] * fy);
            out.a12[id] = fxy - (gam.c[0][1][id] * fx + gam.c[1][1][id] * fy);
            out.a22[id] = fyy - (gam.c[0][2][id] * fx + gam.c[1][2][id] * fy);
        }
    }
}

void gradient_squared(const Grid& g, const Metric& inv, const Field& u, Field& out) {
    const int n = g.n();
    ensure(out, n);
    const double ix = 1.0 / (2.0 * g.hx), iy = 1.0 / (2.0 * g.hy);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; j++) {
        int jp = g.yp(j), jm = g.ym(j);
        for (int i = 0; i < g.nx; i++) {
            int id = g.id(i, j);
            double ux = (u[g.id(g.xp(i), j)] - u[g.id(g.xm(i), j)]) * ix;
            double uy = (u[g.id(i, jp)] - u[g.id(i, jm)]) * iy;
            out[id] = inv.a11[id] * ux * ux + 2.0 * inv.a12[id] * ux * uy + inv.a22[id] * uy * uy;
        }
    }
}

void coupled_curvature(const Grid& g, const Geometry& geo, const Field& u, Metric& St, Field& S) {
    const int n = g.n();
    ensure(St, n);
    ensure(S, n);
    const double ix = 1.0 / (2.0 * g.hx), iy = 1.0 / (2.0 * g.hy);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; j++) {
        int jp = g.yp(j), jm = g.ym(j);
        for (int i = 0; i < g.nx; i++) {
            int id = g.id(i, j);
            double ux = (u[g.id(g.xp(i), j)] - u[g.id(g.xm(i), j)]) * ix;
            double uy = (u[g.id(i, jp)] - u[g.id(i, jm)]) * iy;
            St.a11[id] = geo.ric.a11[id] - 2.0 * ux * ux;
            St.a12[id] = geo.ric.a12[id] - 2.0 * ux * uy;
            St.a22[id] = geo.ric.a22[id] - 2.0 * uy * uy;
            double gu2 = geo.inv.a11[id] * ux * ux + 2.0 * geo.inv.a12[id] * ux * uy
                       + geo.inv.a22[id] * uy * uy;
            S[id] = geo.R[id] - 2.0 * gu2;
        }
    }
}

void coupled_scalar(const Grid& g, const Geometry& geo, const Field& u, Field& S) {
    Field gu2;
    gradient_squared(g, geo.inv, u, gu2);
    const int n = g.n();
    ensure(S, n);
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) S[id] = geo.R[id] - 2.0 * gu2[id];
}

void cov_deriv_sym2(const Grid& g, const Christoffel& gam, const Metric& h, Metric out[2]) {
    const int n = g.n();
    ensure(out[0], n);
    ensure(out[1], n);
    const Field* hc[2][2] = {{&h.a11, &h.a12}, {&h.a12, &h.a22}};
    const double ih[2] = {1.0 / (2.0 * g.hx), 1.0 / (2.0 * g.hy)};
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; j++) {
        for (int i = 0; i < g.nx; i++) {
            int id = g.id(i, j);
            int nb[2][2] = {{g.id(g.xp(i), j), g.id(g.xm(i), j)},
                            {g.id(i, g.yp(j)), g.id(i, g.ym(j))}};
            for (int q = 0; q < 2; q++) {
                Field* oc[3] = {&out[q].a11, &out[q].a12, &out[q].a22};
                for (int a = 0; a < 2; a++) {
                    for (int b = a; b < 2; b++) {
                        double s = ((*hc[a][b])[nb[q][0]] - (*hc[a][b])[nb[q][1]]) * ih[q];
                        for (int mm = 0; mm < 2; mm++) {
                            s -= gam.c[mm][sym_idx(q, a)][id] * (*hc[mm][b])[id];
                            s -= gam.c[mm][sym_idx(q, b)][id] * (*hc[a][mm])[id];
                        }
                        (*oc[sym_idx(a, b)])[id] = s;
                    }
                }
            }
        }
    }
}

double integrate(const Grid& g, const Field& sq, const Field& f) {
    return det_dot(f, sq) * g.hx * g.hy;
}

double volume(const Grid& g, const Field& sq) {
    return det_sum(sq) * g.hx * g.hy;
}

void conformal_metric(const Grid& g, const Field& phi, Metric& out) {
    const int n = g.n();
    ensure(out, n);
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) {
        double e = std::exp(2.0 * phi[id]);
        out.a11[id] = e;
        out.a12[id] = 0.0;
        out.a22[id] = e;
    }
}

void tensor_norm2(const Grid& g, const Metric& inv, const Metric& T, Field& out) {
    const int n = g.n();
    ensure(out, n);
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) {
        double i11 = inv.a11[id], i12 = inv.a12[id], i22 = inv.a22[id];
        double t11 = T.a11[id], t12 = T.a12[id], t22 = T.a22[id];
        // |T|^2 = tr((g^{-1} T)^2)
        double a = i11 * t11 + i12 * t12, b = i11 * t12 + i12 * t22;
        double c = i12 * t11 + i22 * t12, d = i12 * t12 + i22 * t22;
        out[id] = a * a + 2.0 * b * c + d * d;
    }
}

void tensor_inner(const Grid& g, const Metric& inv, const Metric& A, const Metric& B, Field& out) {
    const int n = g.n();
    ensure(out, n);
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) {
        double i11 = inv.a11[id], i12 = inv.a12[id], i22 = inv.a22[id];
        // <A,B> = tr(g^{-1} A g^{-1} B)
        double p00 = i11 * A.a11[id] + i12 * A.a12[id], p01 = i11 * A.a12[id] + i12 * A.a22[id];
        double p10 = i12 * A.a11[id] + i22 * A.a12[id], p11 = i12 * A.a12[id] + i22 * A.a22[id];
        double q00 = i11 * B.a11[id] + i12 * B.a12[id], q01 = i11 * B.a12[id] + i12 * B.a22[id];
        double q10 = i12 * B.a11[id] + i22 * B.a12[id], q11 = i12 * B.a12[id] + i22 * B.a22[id];
        out[id] = p00 * q00 + p01 * q10 + p10 * q01 + p11 * q11;
    }
}

void rel_eigenvalues(const Grid& g, const Metric& m, const Metric& T, Field& lo, Field& hi) {
    const int n = g.n();
    ensure(lo, n);
    ensure(hi, n);
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) {
        double dg = m.a11[id] * m.a22[id] - m.a12[id] * m.a12[id];
        double dT = T.a11[id] * T.a22[id] - T.a12[id] * T.a12[id];
        double B = T.a11[id] * m.a22[id] + T.a22[id] * m.a11[id] - 2.0 * T.a12[id] * m.a12[id];
        double disc = std::sqrt(std::max(0.0, B * B - 4.0 * dg * dT));
        lo[id] = (B - disc) / (2.0 * dg);
        hi[id] = (B + disc) / (2.0 * dg);
    }
}

double weighted_grad_quadrature(const Grid& g, const LapCoeffs& lc, const Field& f) {
    const int n = g.n();
    Field phi(n);
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) phi[id] = std::exp(-0.5 * f[id]);
    return 4.0 * dirichlet_form(g, lc, phi, phi);
}

BianchiResiduals bianchi_residuals(const Grid& g, const Metric& m) {
    const int n = g.n();
    Geometry geo = compute_geometry(g, m);

    // Full Riemann from the stored slice: antisymmetry in the first two
    // lower indices is exact for this construction.
    Field rmf[2][2][2][2];
    for (int k = 0; k < 2; k++)
        for (int l = 0; l < 2; l++) {
            rmf[k][0][0][l] = g.field();
            rmf[k][1][1][l] = g.field();
            rmf[k][0][1][l] = geo.rm[k * 2 + l];
            rmf[k][1][0][l].resize(n);
            for (int id = 0; id < n; id++) rmf[k][1][0][l][id] = -geo.rm[k * 2 + l][id];
        }

    const Field* gm[2][2] = {{&m.a11, &m.a12}, {&m.a12, &m.a22}};
    const Field* gi[2][2] = {{&geo.inv.a11, &geo.inv.a12}, {&geo.inv.a12, &geo.inv.a22}};
    const Field* gam[2][2][2];
    for (int k = 0; k < 2; k++)
        for (int i = 0; i < 2; i++)
            for (int j = 0; j < 2; j++) gam[k][i][j] = &geo.gam.c[k][sym_idx(i, j)];

    // Rlow[i][j][k][l] = g_{im} Rm^m_{jkl};  Rstd[i][j][k][l] = g_{lm} Rm^m_{ijk}
    Field rlow[2][2][2][2], rstd[2][2][2][2];
    for (int i = 0; i < 2; i++)
        for (int j = 0; j < 2; j++)
            for (int k = 0; k < 2; k++)
                for (int l = 0; l < 2; l++) {
                    rlow[i][j][k][l].resize(n);
                    rstd[i][j][k][l].resize(n);
                    for (int id = 0; id < n; id++) {
                        rlow[i][j][k][l][id] = (*gm[i][0])[id] * rmf[0][j][k][l][id]
                                             + (*gm[i][1])[id] * rmf[1][j][k][l][id];
                        rstd[i][j][k][l][id] = (*gm[l][0])[id] * rmf[0][i][j][k][id]
                                             + (*gm[l][1])[id] * rmf[1][i][j][k][id];
                    }
                }

    BianchiResiduals out;
    for (int i = 0; i < 2; i++)
        for (int j = 0; j < 2; j++)
            for (int k = 0; k < 2; k++)
                for (int l = 0; l < 2; l++)
                    for (int id = 0; id < n; id++) {
                        double s = rlow[i][j][k][l][id] + rlow[i][k][l][j][id]
                                 + rlow[i][l][j][k][id];
                        out.first = std::max(out.first, std::abs(s));
                    }

    // covariant derivative of the lowered 4-tensor, derivative index first
    Field dt4[2][2][2][2][2];
    for (int q = 0; q < 2; q++)
        for (int i = 0; i < 2; i++)
            for (int j = 0; j < 2; j++)
                for (int k = 0; k < 2; k++)
                    for (int l = 0; l < 2; l++) {
                        Field& o = dt4[q][i][j][k][l];
                        o.resize(n);
                        const Field& base = rstd[i][j][k][l];
#pragma omp parallel for schedule(static)
                        for (int jj = 0; jj < g.ny; jj++)
                            for (int ii = 0; ii < g.nx; ii++) {
                                int id = g.id(ii, jj);
                                double s = dc(g, base, q, ii, jj);
                                for (int mm = 0; mm < 2; mm++)
                                    s -= (*gam[mm][q][i])[id] * rstd[mm][j][k][l][id]
                                       + (*gam[mm][q][j])[id] * rstd[i][mm][k][l][id]
                                       + (*gam[mm][q][k])[id] * rstd[i][j][mm][l][id]
                                       + (*gam[mm][q][l])[id] * rstd[i][j][k][mm][id];
                                o[id] = s;
                            }
                    }
    for (int q = 0; q < 2; q++)
        for (int i = 0; i < 2; i++)
            for (int j = 0; j < 2; j++)
                for (int k = 0; k < 2; k++)
                    for (int l = 0; l < 2; l++)
                        for (int id = 0; id < n; id++) {
                            double s = dt4[q][i][j][k][l][id] + dt4[i][j][q][k][l][id]
                                     + dt4[j][q][i][k][l][id];
                            out.second = std::max(out.second, std::abs(s));
                        }

    // covariant derivative of Ricci, derivative index first
    const Field* ric[2][2] = {{&geo.ric.a11, &geo.ric.a12}, {&geo.ric.a12, &geo.ric.a22}};
    Field dric[2][2][2];
    for (int q = 0; q < 2; q++)
        for (int a = 0; a < 2; a++)
            for (int b = 0; b < 2; b++) {
                Field& o = dric[q][a][b];
                o.resize(n);
#pragma omp parallel for schedule(static)
                for (int jj = 0; jj < g.ny; jj++)
                    for (int ii = 0; ii < g.nx; ii++) {
                        int id = g.id(ii, jj);
                        double s = dc(g, *ric[a][b], q, ii, jj);
                        for (int mm = 0; mm < 2; mm++)
                            s -= (*gam[mm][q][a])[id] * (*ric[mm][b])[id]
                               + (*gam[mm][q][b])[id] * (*ric[a][mm])[id];
                        o[id] = s;
                    }
            }

    // 2 div Ric - dR
    for (int i = 0; i < 2; i++)
        for (int jj = 0; jj < g.ny; jj++)
            for (int ii = 0; ii < g.nx; ii++) {
                int id = g.id(ii, jj);
                double s = -dc(g, geo.R, i, ii, jj);
                for (int a = 0; a < 2; a++)
                    for (int b = 0; b < 2; b++)
                        s += 2.0 * (*gi[a][b])[id] * dric[b][a][i][id];
                out.contracted1 = std::max(out.contracted1, std::abs(s));
            }

    // nabla_i Ric_jk - nabla_j Ric_ik + g^{ml} nabla_m Rstd_{lkij}
    for (int i = 0; i < 2; i++)
        for (int j = 0; j < 2; j++)
            for (int k = 0; k < 2; k++)
                for (int id = 0; id < n; id++) {
                    double s = dric[i][j][k][id] - dric[j][i][k][id];
                    for (int mm = 0; mm < 2; mm++)
                        for (int ll = 0; ll < 2; ll++)
                            s += (*gi[mm][ll])[id] * dt4[mm][ll][k][i][j][id];
                    out.contracted2 = std::max(out.contracted2, std::abs(s));
                }
    return out;
}

}  // namespace hrf
