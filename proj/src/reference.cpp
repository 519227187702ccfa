#include "hrf/reference.hpp"
#include <cmath>

namespace hrf {
namespace ref {

Field dx(const Grid& g, const Field& f) {
    Field out(g.n());
    for (int j = 0; j < g.ny; j++)
        for (int i = 0; i < g.nx; i++)
            out[g.id(i, j)] = (f[g.id(g.xp(i), j)] - f[g.id(g.xm(i), j)]) / (2.0 * g.hx);
    return out;
}

Field dy(const Grid& g, const Field& f) {
    Field out(g.n());
    for (int j = 0; j < g.ny; j++)
        for (int i = 0; i < g.nx; i++)
            out[g.id(i, j)] = (f[g.id(i, g.yp(j))] - f[g.id(i, g.ym(j))]) / (2.0 * g.hy);
    return out;
}

Field dxx(const Grid& g, const Field& f) {
    Field out(g.n());
    for (int j = 0; j < g.ny; j++)
        for (int i = 0; i < g.nx; i++)
            out[g.id(i, j)] = (f[g.id(g.xp(i), j)] - 2.0 * f[g.id(i, j)] + f[g.id(g.xm(i), j)])
                              / (g.hx * g.hx);
    return out;
}

Field dyy(const Grid& g, const Field& f) {
    Field out(g.n());
    for (int j = 0; j < g.ny; j++)
        for (int i = 0; i < g.nx; i++)
            out[g.id(i, j)] = (f[g.id(i, g.yp(j))] - 2.0 * f[g.id(i, j)] + f[g.id(i, g.ym(j))])
                              / (g.hy * g.hy);
    return out;
}

Field dxy(const Grid& g, const Field& f) {
    Field out(g.n());
    for (int j = 0; j < g.ny; j++)
        for (int i = 0; i < g.nx; i++) {
            int ip = g.xp(i), im = g.xm(i), jp = g.yp(j), jm = g.ym(j);
            out[g.id(i, j)] = (f[g.id(ip, jp)] - f[g.id(ip, jm)] - f[g.id(im, jp)] + f[g.id(im, jm)])
                              / (4.0 * g.hx * g.hy);
        }
    return out;
}

void metric_inverse(const Grid& g, const Metric& m, Metric& inv, Field& det, Field& sq) {
    int n = g.n();
    inv.a11.resize(n); inv.a12.resize(n); inv.a22.resize(n);
    det.resize(n); sq.resize(n);
    for (int id = 0; id < n; id++) {
        double d = m.a11[id] * m.a22[id] - m.a12[id] * m.a12[id];
        det[id] = d;
        sq[id] = std::sqrt(d);
        inv.a11[id] = m.a22[id] / d;
        inv.a12[id] = -m.a12[id] / d;
        inv.a22[id] = m.a11[id] / d;
    }
}

void christoffel_full(const Grid& g, const Metric& m, const Metric& inv, Field gam[2][2][2]) {
    int n = g.n();
    const Field* gc[2][2] = {{&m.a11, &m.a12}, {&m.a12, &m.a22}};
    const Field* ic[2][2] = {{&inv.a11, &inv.a12}, {&inv.a12, &inv.a22}};
    // dg[a][b][q] = d_q g_ab
    Field dg[2][2][2];
    for (int a = 0; a < 2; a++)
        for (int b = 0; b < 2; b++) {
            dg[a][b][0] = dx(g, *gc[a][b]);
            dg[a][b][1] = dy(g, *gc[a][b]);
        }
    for (int k = 0; k < 2; k++)
        for (int i = 0; i < 2; i++)
            for (int j = 0; j < 2; j++) {
                gam[k][i][j].assign(n, 0.0);
                for (int id = 0; id < n; id++) {
                    double s = 0.0;
                    for (int l = 0; l < 2; l++)
                        s += (*ic[k][l])[id] * (dg[j][l][i][id] + dg[i][l][j][id]
                                                - dg[i][j][l][id]);
                    gam[k][i][j][id] = 0.5 * s;
                }
            }
}

void riemann_full(const Grid& g, const Field gam[2][2][2], Field rm[2][2][2][2]) {
    int n = g.n();
    // dG[k][a][b][q] = d_q Gamma^k_ab
    Field dG[2][2][2][2];
    for (int k = 0; k < 2; k++)
        for (int a = 0; a < 2; a++)
            for (int b = 0; b < 2; b++) {
                dG[k][a][b][0] = dx(g, gam[k][a][b]);
                dG[k][a][b][1] = dy(g, gam[k][a][b]);
            }
    for (int k = 0; k < 2; k++)
        for (int i = 0; i < 2; i++)
            for (int j = 0; j < 2; j++)
                for (int l = 0; l < 2; l++) {
                    rm[k][i][j][l].resize(n);
                    for (int id = 0; id < n; id++) {
                        double s = dG[k][j][l][i][id] - dG[k][i][l][j][id];
                        for (int p = 0; p < 2; p++)
                            s += gam[k][i][p][id] * gam[p][j][l][id]
                               - gam[k][j][p][id] * gam[p][i][l][id];
                        rm[k][i][j][l][id] = s;
                    }
                }
}

void ricci(const Grid& g, const Field rm[2][2][2][2], const Metric& inv, Metric& ric, Field& R) {
    int n = g.n();
    ric.a11.resize(n); ric.a12.resize(n); ric.a22.resize(n);
    R.resize(n);
    const Field* ic[2][2] = {{&inv.a11, &inv.a12}, {&inv.a12, &inv.a22}};
    for (int id = 0; id < n; id++) {
        double rc[2][2];
        for (int jj = 0; jj < 2; jj++)
            for (int ll = 0; ll < 2; ll++)
                rc[jj][ll] = rm[0][0][jj][ll][id] + rm[1][1][jj][ll][id];
        double r11 = rc[0][0];
        double r22 = rc[1][1];
        double r12 = 0.5 * (rc[0][1] + rc[1][0]);
        ric.a11[id] = r11;
        ric.a12[id] = r12;
        ric.a22[id] = r22;
        double rsym[2][2] = {{r11, r12}, {r12, r22}};
        double s = 0.0;
        for (int jj = 0; jj < 2; jj++)
            for (int ll = 0; ll < 2; ll++)
                s += (*ic[jj][ll])[id] * rsym[jj][ll];
        R[id] = s;
    }
}

Field laplace_beltrami(const Grid& g, const Metric& m, const Field& f) {
    int n = g.n();
    Metric inv(g);
    Field det, sq;
    metric_inverse(g, m, inv, det, sq);
    Field a11(n), a12(n), a22(n);
    for (int id = 0; id < n; id++) {
        a11[id] = sq[id] * inv.a11[id];
        a12[id] = sq[id] * inv.a12[id];
        a22[id] = sq[id] * inv.a22[id];
    }
    Field cx(n), cy(n);
    Field fdx = dx(g, f), fdy = dy(g, f);
    for (int id = 0; id < n; id++) {
        cx[id] = a12[id] * fdy[id];
        cy[id] = a12[id] * fdx[id];
    }
    Field t3 = dx(g, cx), t4 = dy(g, cy);
    Field out(n);
    for (int j = 0; j < g.ny; j++)
        for (int i = 0; i < g.nx; i++) {
            int id = g.id(i, j);
            int ixp = g.id(g.xp(i), j), ixm = g.id(g.xm(i), j);
            int iyp = g.id(i, g.yp(j)), iym = g.id(i, g.ym(j));
            double e11 = 0.5 * (a11[id] + a11[ixp]);
            double w11 = 0.5 * (a11[ixm] + a11[id]);
            double n22 = 0.5 * (a22[id] + a22[iyp]);
            double s22 = 0.5 * (a22[iym] + a22[id]);
            double t1 = (e11 * (f[ixp] - f[id]) - w11 * (f[id] - f[ixm])) / (g.hx * g.hx);
            double t2 = (n22 * (f[iyp] - f[id]) - s22 * (f[id] - f[iym])) / (g.hy * g.hy);
            out[id] = (t1 + t2 + t3[id] + t4[id]) / sq[id];
        }
    return out;
}

double dirichlet(const Grid& g, const Metric& m, const Field& f, const Field& q) {
    int n = g.n();
    Metric inv(g);
    Field det, sq;
    metric_inverse(g, m, inv, det, sq);
    Field a11(n), a12(n), a22(n);
    for (int id = 0; id < n; id++) {
        a11[id] = sq[id] * inv.a11[id];
        a12[id] = sq[id] * inv.a12[id];
        a22[id] = sq[id] * inv.a22[id];
    }
    Field fcx = dx(g, f), fcy = dy(g, f), qcx = dx(g, q), qcy = dy(g, q);
    double total = 0.0;
    for (int j = 0; j < g.ny; j++)
        for (int i = 0; i < g.nx; i++) {
            int id = g.id(i, j);
            int ixp = g.id(g.xp(i), j);
            int iyp = g.id(i, g.yp(j));
            double e11 = 0.5 * (a11[id] + a11[ixp]);
            double n22 = 0.5 * (a22[id] + a22[iyp]);
            double fx = (f[ixp] - f[id]) / g.hx, qx = (q[ixp] - q[id]) / g.hx;
            double fy = (f[iyp] - f[id]) / g.hy, qy = (q[iyp] - q[id]) / g.hy;
            total += e11 * fx * qx + n22 * fy * qy
                   + a12[id] * (fcx[id] * qcy[id] + fcy[id] * qcx[id]);
        }
    return total * g.hx * g.hy;
}

void hessian(const Grid& g, const Metric& m, const Field& f, Metric& out) {
    int n = g.n();
    out.a11.resize(n); out.a12.resize(n); out.a22.resize(n);
    Metric inv(g);
    Field det, sq;
    metric_inverse(g, m, inv, det, sq);
    Field gam[2][2][2];
    christoffel_full(g, m, inv, gam);
    Field fx = dx(g, f), fy = dy(g, f);
    Field fxx = dxx(g, f), fyy = dyy(g, f), fxy = dxy(g, f);
    Field* oc[2][2] = {{&out.a11, &out.a12}, {&out.a12, &out.a22}};
    const Field* d1[2] = {&fx, &fy};
    const Field* d2[2][2] = {{&fxx, &fxy}, {&fxy, &fyy}};
    for (int i = 0; i < 2; i++)
        for (int j = i; j < 2; j++)
            for (int id = 0; id < n; id++) {
                double s = (*d2[i][j])[id];
                for (int k = 0; k < 2; k++) s -= gam[k][i][j][id] * (*d1[k])[id];
                (*oc[i][j])[id] = s;
            }
}

Field grad2(const Grid& g, const Metric& m, const Field& u) {
    int n = g.n();
    Metric inv(g);
    Field det, sq;
    metric_inverse(g, m, inv, det, sq);
    Field ux = dx(g, u), uy = dy(g, u);
    Field out(n);
    const Field* ic[2][2] = {{&inv.a11, &inv.a12}, {&inv.a12, &inv.a22}};
    const Field* d[2] = {&ux, &uy};
    for (int id = 0; id < n; id++) {
        double s = 0.0;
        for (int i = 0; i < 2; i++)
            for (int j = 0; j < 2; j++)
                s += (*ic[i][j])[id] * (*d[i])[id] * (*d[j])[id];
        out[id] = s;
    }
    return out;
}

double integrate(const Grid& g, const Metric& m, const Field& f) {
    Metric inv(g);
    Field det, sq;
    metric_inverse(g, m, inv, det, sq);
    double total = 0.0;
    for (int id = 0; id < g.n(); id++) total += f[id] * sq[id];
    return total * g.hx * g.hy;
}

}  // namespace ref
}  // namespace hrf
