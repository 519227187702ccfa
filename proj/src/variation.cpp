#include "hrf/variation.hpp"
#include "hrf/errors.hpp"
#include "hrf/par.hpp"
#include <cmath>

namespace hrf {

namespace {

constexpr double kDim = 2.0;

inline const Field& comp(const Metric& h, int a, int b) {
    int s = sym_idx(a, b);
    return s == 0 ? h.a11 : (s == 1 ? h.a12 : h.a22);
}

inline double hval(const Metric& h, int a, int b, int id) {
    int s = sym_idx(a, b);
    return s == 0 ? h.a11[id] : (s == 1 ? h.a12[id] : h.a22[id]);
}

}  // namespace

void linearized_scalar_curvature(const Grid& gr, const Metric& g, const Metric& h,
                                 Field& out) {
    Geometry geo = compute_geometry(gr, g);

    // linearized Christoffel dG^k_{ij} = g^{kl}(D_i h_jl + D_j h_il - D_l h_ij)/2
    Field dG[2][3];
    for (int k = 0; k < 2; k++)
        for (int s = 0; s < 3; s++) dG[k][s] = gr.field();
#pragma omp parallel for schedule(static)
    for (int j = 0; j < gr.ny; j++) {
        for (int i = 0; i < gr.nx; i++) {
            int id = gr.id(i, j);
            double Dh[2][2][2];
            for (int q = 0; q < 2; q++)
                for (int a = 0; a < 2; a++)
                    for (int b = a; b < 2; b++) {
                        double s = dc(gr, comp(h, a, b), q, i, j);
                        for (int m = 0; m < 2; m++)
                            s -= geo.gam.c[m][sym_idx(q, a)][id] * hval(h, m, b, id) +
                                 geo.gam.c[m][sym_idx(q, b)][id] * hval(h, a, m, id);
                        Dh[q][a][b] = s;
                        Dh[q][b][a] = s;
                    }
            double gi[2][2] = {{geo.inv.a11[id], geo.inv.a12[id]},
                               {geo.inv.a12[id], geo.inv.a22[id]}};
            for (int k = 0; k < 2; k++)
                for (int a = 0; a < 2; a++)
                    for (int b = a; b < 2; b++) {
                        double s = 0.0;
                        for (int l = 0; l < 2; l++)
                            s += gi[k][l] * (Dh[a][b][l] + Dh[b][a][l] - Dh[l][a][b]);
                        dG[k][sym_idx(a, b)][id] = 0.5 * s;
                    }
        }
    }

    out.assign(gr.n(), 0.0);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < gr.ny; j++) {
        for (int i = 0; i < gr.nx; i++) {
            int id = gr.id(i, j);
            double gi[2][2] = {{geo.inv.a11[id], geo.inv.a12[id]},
                               {geo.inv.a12[id], geo.inv.a22[id]}};
            double ric[2][2] = {{geo.ric.a11[id], geo.ric.a12[id]},
                                {geo.ric.a12[id], geo.ric.a22[id]}};
            double hm[2][2] = {{h.a11[id], h.a12[id]}, {h.a12[id], h.a22[id]}};
            double hup[2][2];
            for (int a = 0; a < 2; a++)
                for (int b = 0; b < 2; b++) {
                    double s = 0.0;
                    for (int p = 0; p < 2; p++)
                        for (int q = 0; q < 2; q++) s += gi[a][p] * gi[b][q] * hm[p][q];
                    hup[a][b] = s;
                }
            // covariant derivative of dG as a (1,2)-tensor
            double NdG[2][2][2][2];
            for (int q = 0; q < 2; q++)
                for (int k = 0; k < 2; k++)
                    for (int a = 0; a < 2; a++)
                        for (int b = 0; b < 2; b++) {
                            double s = dc(gr, dG[k][sym_idx(a, b)], q, i, j);
                            for (int m = 0; m < 2; m++)
                                s += geo.gam.c[k][sym_idx(q, m)][id] * dG[m][sym_idx(a, b)][id] -
                                     geo.gam.c[m][sym_idx(q, a)][id] * dG[k][sym_idx(m, b)][id] -
                                     geo.gam.c[m][sym_idx(q, b)][id] * dG[k][sym_idx(a, m)][id];
                            NdG[q][k][a][b] = s;
                        }
            double val = 0.0;
            for (int a = 0; a < 2; a++)
                for (int b = 0; b < 2; b++) val -= hup[a][b] * ric[a][b];
            for (int a = 0; a < 2; a++)
                for (int b = 0; b < 2; b++) {
                    double s = 0.0;
                    for (int k = 0; k < 2; k++) s += NdG[k][k][a][b] - NdG[a][k][k][b];
                    val += gi[a][b] * s;
                }
            out[id] = val;
        }
    }
}

double nu_first_variation(const Grid& gr, const Metric& g, const Field& u,
                          const Metric& h, const Field& v,
                          const MinimizerResult& base, int sign) {
    if (sign != 1 && sign != -1) throw domain_error("sign must be +1 or -1");
    if (base.boundary_hit)
        throw domain_error("first variation needs an interior optimal tau");
    if (base.w_star.size() != g.a11.size() || base.f_star.size() != g.a11.size())
        throw domain_error("minimizer data does not match the grid");
    const double tau = base.tau_star;
    const Field& w = base.w_star;
    const Field& f = base.f_star;

    Geometry geo = compute_geometry(gr, g);
    LapCoeffs lc = lap_coeffs(gr, geo.inv, geo.sq);
    Metric St(gr);
    Field S = gr.field();
    coupled_curvature(gr, geo, u, St, S);
    Metric Hf(gr);
    hessian(gr, geo.gam, f, Hf);
    Field lapu = gr.field();
    laplace_beltrami(gr, lc, u, lapu);

    const int nx = gr.nx, ny = gr.ny;
    Field term_g = gr.field(), term_u = gr.field();
#pragma omp parallel for schedule(static)
    for (int j = 0; j < ny; j++) {
        for (int i = 0; i < nx; i++) {
            int id = gr.id(i, j);
            double gi[2][2] = {{geo.inv.a11[id], geo.inv.a12[id]},
                               {geo.inv.a12[id], geo.inv.a22[id]}};
            double hm[2][2] = {{h.a11[id], h.a12[id]}, {h.a12[id], h.a22[id]}};
            double hup[2][2];
            double trh = 0.0;
            for (int a = 0; a < 2; a++)
                for (int b = 0; b < 2; b++) {
                    double s = 0.0;
                    for (int p = 0; p < 2; p++)
                        for (int q = 0; q < 2; q++) s += gi[a][p] * gi[b][q] * hm[p][q];
                    hup[a][b] = s;
                    trh += gi[a][b] * hm[a][b];
                }
            double st[2][2] = {{St.a11[id], St.a12[id]}, {St.a12[id], St.a22[id]}};
            double hf[2][2] = {{Hf.a11[id], Hf.a12[id]}, {Hf.a12[id], Hf.a22[id]}};
            double hS = 0.0, hH = 0.0;
            for (int a = 0; a < 2; a++)
                for (int b = 0; b < 2; b++) {
                    hS += hup[a][b] * st[a][b];
                    hH += hup[a][b] * hf[a][b];
                }
            double du[2] = {dxc(gr, u, i, j), dyc(gr, u, i, j)};
            double df[2] = {dxc(gr, f, i, j), dyc(gr, f, i, j)};
            double dudf = 0.0;
            for (int a = 0; a < 2; a++)
                for (int b = 0; b < 2; b++) dudf += gi[a][b] * du[a] * df[b];
            double wt = w[id] * w[id] * lc.mass[id];
            term_g[id] = (hS + hH + sign * trh / (2.0 * tau)) * wt;
            term_u[id] = v[id] * (lapu[id] - dudf) * wt;
        }
    }
    return -tau * det_sum(term_g) + 4.0 * tau * det_sum(term_u);
}

void euler_lagrange_residual(const Grid& gr, const Metric& g, const Field& u,
                             const Field& f, double tau, double nu, int sign,
                             double& eq1, double& eq2) {
    if (sign != 1 && sign != -1) throw domain_error("sign must be +1 or -1");
    if (!(tau > 0.0)) throw domain_error("tau must be positive");
    Geometry geo = compute_geometry(gr, g);
    LapCoeffs lc = lap_coeffs(gr, geo.inv, geo.sq);
    Field S = gr.field();
    coupled_scalar(gr, geo, u, S);

    const int n = gr.n();
    const double pref = std::pow(4.0 * M_PI * tau, kDim / 2.0);
    Field w(f.size());
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) w[id] = std::exp(-0.5 * f[id]) / std::sqrt(pref);
    Field wt(f.size());
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) wt[id] = w[id] * w[id] * lc.mass[id];
    double total = det_sum(wt);
    if (!(std::abs(total - 1.0) <= 1e-8))
        throw domain_error("weight normalization off by " + std::to_string(total - 1.0));

    Field lapw(f.size());
    laplace_beltrami(gr, lc, w, lapw);
    // residual accumulated as r*w so nodes where w underflows stay finite
    Field rr(f.size());
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) {
        double rw = tau * (4.0 * lapw[id] - S[id] * w[id])
                  + (sign * f[id] - sign * kDim + nu) * w[id];
        rr[id] = rw * rw;
    }
    eq1 = std::sqrt(det_dot(rr, lc.mass) / total);
    double Q = det_dot(f, wt);
    eq2 = std::abs(Q - (kDim / 2.0 - sign * nu));
}

void soliton_residual(const Grid& gr, const Metric& g, const Field& u,
                      const Field& f, double c,
                      double& tensor_norm, double& scalar_norm) {
    Geometry geo = compute_geometry(gr, g);
    LapCoeffs lc = lap_coeffs(gr, geo.inv, geo.sq);
    Metric St(gr);
    Field S = gr.field();
    coupled_curvature(gr, geo, u, St, S);
    Metric Hf(gr);
    hessian(gr, geo.gam, f, Hf);

    const int n = gr.n();
    Metric T(gr);
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) {
        T.a11[id] = St.a11[id] + Hf.a11[id] + c * g.a11[id];
        T.a12[id] = St.a12[id] + Hf.a12[id] + c * g.a12[id];
        T.a22[id] = St.a22[id] + Hf.a22[id] + c * g.a22[id];
    }
    Field t2 = gr.field();
    tensor_norm2(gr, geo.inv, T, t2);
    tensor_norm = std::sqrt(std::max(det_max(t2), 0.0));

    Field lapu = gr.field();
    laplace_beltrami(gr, lc, u, lapu);
    Field res = gr.field();
#pragma omp parallel for schedule(static)
    for (int j = 0; j < gr.ny; j++) {
        for (int i = 0; i < gr.nx; i++) {
            int id = gr.id(i, j);
            double gi[2][2] = {{geo.inv.a11[id], geo.inv.a12[id]},
                               {geo.inv.a12[id], geo.inv.a22[id]}};
            double du[2] = {dxc(gr, u, i, j), dyc(gr, u, i, j)};
            double df[2] = {dxc(gr, f, i, j), dyc(gr, f, i, j)};
            double dudf = 0.0;
            for (int a = 0; a < 2; a++)
                for (int b = 0; b < 2; b++) dudf += gi[a][b] * du[a] * df[b];
            res[id] = std::abs(lapu[id] - dudf);
        }
    }
    scalar_norm = det_max(res);
}

}  // namespace hrf
