#include "hrf/flow.hpp"
#include "hrf/errors.hpp"
#include "hrf/par.hpp"
#include <cmath>
#include <algorithm>
#include <string>

namespace hrf {

void check_metric_valid(const Grid& gr, const Metric& g) {
    for (int j = 0; j < gr.ny; j++)
        for (int i = 0; i < gr.nx; i++) {
            int id = gr.id(i, j);
            double a = g.a11[id], b = g.a12[id], c = g.a22[id];
            double d = a * c - b * b;
            if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c)) || a <= 0.0 || d <= 0.0)
                throw domain_error("metric not positive-definite at node (" + std::to_string(i)
                                   + "," + std::to_string(j) + ")");
        }
}

namespace {
bool metric_ok(const Grid& gr, const Metric& g, const Field& u) {
    const int n = gr.n();
    for (int id = 0; id < n; id++) {
        double a = g.a11[id], b = g.a12[id], c = g.a22[id];
        if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(u[id])))
            return false;
        if (a <= 0.0 || a * c - b * b <= 0.0) return false;
    }
    return true;
}
}  // namespace

double stability_dt_bound(const Grid& gr, const Metric& g) {
    const int n = gr.n();
    double lo = 0.0, hi = 0.0;
    for (int id = 0; id < n; id++) {
        double a = g.a11[id], b = g.a12[id], c = g.a22[id];
        double tr = a + c, det = a * c - b * b;
        double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
        double lmin = 0.5 * (tr - disc);
        double linvmax = 1.0 / lmin;  // largest eigenvalue of g^{-1}
        if (id == 0 || lmin < lo) lo = lmin;
        if (id == 0 || linvmax > hi) hi = linvmax;
    }
    double h = std::min(gr.hx, gr.hy);
    return 0.1 * h * h * lo / hi;
}

void s_tensor(const Grid& gr, const Metric& g, const Field& u, Metric& St, Field& S) {
    Geometry geo = compute_geometry(gr, g);
    coupled_curvature(gr, geo, u, St, S);
}

void flow_rhs(const Grid& gr, const Metric& g, const Field& u, GaugeMode mode,
              Metric& dg, Field& du) {
    const int n = gr.n();
    if ((int)dg.a11.size() != n) { dg.a11.resize(n); dg.a12.resize(n); dg.a22.resize(n); }
    if ((int)du.size() != n) du.resize(n);

    Geometry geo = compute_geometry(gr, g);
    LapCoeffs lc = lap_coeffs(gr, geo.inv, geo.sq);
    laplace_beltrami(gr, lc, u, du);

#pragma omp parallel for schedule(static)
    for (int j = 0; j < gr.ny; j++) {
        int jp = gr.yp(j), jm = gr.ym(j);
        for (int i = 0; i < gr.nx; i++) {
            int id = gr.id(i, j);
            double ux = (u[gr.id(gr.xp(i), j)] - u[gr.id(gr.xm(i), j)]) / (2.0 * gr.hx);
            double uy = (u[gr.id(i, jp)] - u[gr.id(i, jm)]) / (2.0 * gr.hy);
            dg.a11[id] = -2.0 * geo.ric.a11[id] + 4.0 * ux * ux;
            dg.a12[id] = -2.0 * geo.ric.a12[id] + 4.0 * ux * uy;
            dg.a22[id] = -2.0 * geo.ric.a22[id] + 4.0 * uy * uy;
        }
    }

    if (mode == GaugeMode::deturck) {
        // W^k = g^{pq} Gamma^k_{pq} against a flat background, lowered to W_j.
        Field wlo[2] = {Field(n), Field(n)};
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++) {
            double i11 = geo.inv.a11[id], i12 = geo.inv.a12[id], i22 = geo.inv.a22[id];
            double w0 = i11 * geo.gam.c[0][0][id] + 2.0 * i12 * geo.gam.c[0][1][id]
                      + i22 * geo.gam.c[0][2][id];
            double w1 = i11 * geo.gam.c[1][0][id] + 2.0 * i12 * geo.gam.c[1][1][id]
                      + i22 * geo.gam.c[1][2][id];
            wlo[0][id] = g.a11[id] * w0 + g.a12[id] * w1;
            wlo[1][id] = g.a12[id] * w0 + g.a22[id] * w1;
        }
#pragma omp parallel for schedule(static)
        for (int j = 0; j < gr.ny; j++) {
            for (int i = 0; i < gr.nx; i++) {
                int id = gr.id(i, j);
                // covariant derivatives of the lowered gauge vector
                double d00 = dxc(gr, wlo[0], i, j), d01 = dyc(gr, wlo[0], i, j);
                double d10 = dxc(gr, wlo[1], i, j), d11 = dyc(gr, wlo[1], i, j);
                double c00 = d00 - (geo.gam.c[0][0][id] * wlo[0][id] + geo.gam.c[1][0][id] * wlo[1][id]);
                double c01 = 0.5 * (d01 + d10)
                           - (geo.gam.c[0][1][id] * wlo[0][id] + geo.gam.c[1][1][id] * wlo[1][id]);
                double c11 = d11 - (geo.gam.c[0][2][id] * wlo[0][id] + geo.gam.c[1][2][id] * wlo[1][id]);
                dg.a11[id] += 2.0 * c00;
                dg.a12[id] += 2.0 * c01;
                dg.a22[id] += 2.0 * c11;
                // advection of u: W^k d_k u, recovered by raising the lowered field
                double i11 = geo.inv.a11[id], i12 = geo.inv.a12[id], i22 = geo.inv.a22[id];
                double w0 = i11 * wlo[0][id] + i12 * wlo[1][id];
                double w1 = i12 * wlo[0][id] + i22 * wlo[1][id];
                du[id] += w0 * dxc(gr, u, i, j) + w1 * dyc(gr, u, i, j);
            }
        }
    }
}

namespace {

struct Work {
    Metric g1, g2, g3;
    Field u1, u2, u3;
    Metric k1g, k2g, k3g, k4g;
    Field k1u, k2u, k3u, k4u;
};

void axpy_state(const Grid& gr, const Metric& g, const Field& u, const Metric& dg,
                const Field& du, double c, Metric& go, Field& uo) {
    const int n = gr.n();
    if ((int)go.a11.size() != n) { go.a11.resize(n); go.a12.resize(n); go.a22.resize(n); }
    if ((int)uo.size() != n) uo.resize(n);
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) {
        go.a11[id] = g.a11[id] + c * dg.a11[id];
        go.a12[id] = g.a12[id] + c * dg.a12[id];
        go.a22[id] = g.a22[id] + c * dg.a22[id];
        uo[id] = u[id] + c * du[id];
    }
}

void rk4_step(const Grid& gr, const Metric& g, const Field& u, double dt, GaugeMode mode,
              Work& w, Metric& go, Field& uo) {
    flow_rhs(gr, g, u, mode, w.k1g, w.k1u);
    axpy_state(gr, g, u, w.k1g, w.k1u, 0.5 * dt, w.g1, w.u1);
    flow_rhs(gr, w.g1, w.u1, mode, w.k2g, w.k2u);
    axpy_state(gr, g, u, w.k2g, w.k2u, 0.5 * dt, w.g2, w.u2);
    flow_rhs(gr, w.g2, w.u2, mode, w.k3g, w.k3u);
    axpy_state(gr, g, u, w.k3g, w.k3u, dt, w.g3, w.u3);
    flow_rhs(gr, w.g3, w.u3, mode, w.k4g, w.k4u);
    const int n = gr.n();
    if ((int)go.a11.size() != n) { go.a11.resize(n); go.a12.resize(n); go.a22.resize(n); }
    if ((int)uo.size() != n) uo.resize(n);
    const double c = dt / 6.0;
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) {
        go.a11[id] = g.a11[id] + c * (w.k1g.a11[id] + 2.0 * w.k2g.a11[id] + 2.0 * w.k3g.a11[id] + w.k4g.a11[id]);
        go.a12[id] = g.a12[id] + c * (w.k1g.a12[id] + 2.0 * w.k2g.a12[id] + 2.0 * w.k3g.a12[id] + w.k4g.a12[id]);
        go.a22[id] = g.a22[id] + c * (w.k1g.a22[id] + 2.0 * w.k2g.a22[id] + 2.0 * w.k3g.a22[id] + w.k4g.a22[id]);
        uo[id] = u[id] + c * (w.k1u[id] + 2.0 * w.k2u[id] + 2.0 * w.k3u[id] + w.k4u[id]);
    }
}

}  // namespace

Trajectory evolve(const Grid& gr, const FlowState& init, const EvolveOptions& opt) {
    if (opt.T <= 0.0 || opt.dt <= 0.0) throw config_error("evolve: T and dt must be positive");
    if (opt.stride < 1) throw config_error("evolve: stride must be >= 1");
    check_metric_valid(gr, init.g);
    if (opt.check_bound) {
        double bound = stability_dt_bound(gr, init.g);
        if (opt.dt > bound)
            throw config_error("evolve: dt " + std::to_string(opt.dt)
                               + " above stability bound " + std::to_string(bound));
    }

    Trajectory traj;
    traj.stride = opt.stride;
    traj.gauge = opt.gauge;

    FlowState cur = init;
    Work w;
    Metric gn;
    Field un;
    int step = 0, halvings = 0;
    double dt = opt.dt;
    const double tend = init.t + opt.T;

    auto snap = [&](const FlowState& s) {
        traj.times.push_back(s.t);
        traj.gs.push_back(s.g);
        traj.us.push_back(s.u);
    };
    snap(cur);
    traj.step_times.push_back(cur.t);
    if (opt.on_step) opt.on_step(0, cur);

    while (cur.t < tend - 1e-12 * std::max(1.0, tend)) {
        double step_dt = std::min(dt, tend - cur.t);
        rk4_step(gr, cur.g, cur.u, step_dt, opt.gauge, w, gn, un);
        if (!metric_ok(gr, gn, un)) {
            if (halvings >= opt.max_halvings) {
                traj.blown_up = true;
                traj.note = "positivity lost at t = " + std::to_string(cur.t)
                          + " after " + std::to_string(halvings) + " halvings";
                break;
            }
            dt *= 0.5;
            halvings++;
            continue;
        }
        cur.g.a11.swap(gn.a11);
        cur.g.a12.swap(gn.a12);
        cur.g.a22.swap(gn.a22);
        cur.u.swap(un);
        cur.t += step_dt;
        step++;
        traj.step_times.push_back(cur.t);
        if (step % opt.stride == 0) snap(cur);
        if (opt.on_step) opt.on_step(step, cur);
    }
    if (!traj.blown_up && traj.times.back() != cur.t) snap(cur);
    return traj;
}

namespace {

// per-state quantities entering the evolution identities
struct StatePack {
    Field R, gu2, S;        // tracked scalars
    Field rhsR, rhsG, rhsS; // their predicted time derivatives
    double vol = 0.0, intS = 0.0;
};

void pack_state(const Grid& gr, const Metric& g, const Field& u, StatePack& p) {
    const int n = gr.n();
    Geometry geo = compute_geometry(gr, g);
    LapCoeffs lc = lap_coeffs(gr, geo.inv, geo.sq);

    Metric St(gr);
    Field S(n);
    coupled_curvature(gr, geo, u, St, S);
    Field gu2(n);
    gradient_squared(gr, geo.inv, u, gu2);

    Field lapU(n), lapR(n), lapG(n), lapS(n);
    laplace_beltrami(gr, lc, u, lapU);
    laplace_beltrami(gr, lc, geo.R, lapR);
    laplace_beltrami(gr, lc, gu2, lapG);
    laplace_beltrami(gr, lc, S, lapS);

    Metric Hu(gr);
    hessian(gr, geo.gam, u, Hu);
    Field hu2(n), ric2(n), st2(n);
    tensor_norm2(gr, geo.inv, Hu, hu2);
    tensor_norm2(gr, geo.inv, geo.ric, ric2);
    tensor_norm2(gr, geo.inv, St, st2);

    p.R = geo.R;
    p.gu2 = gu2;
    p.S = S;
    p.vol = volume(gr, geo.sq);
    p.intS = integrate(gr, geo.sq, S);
    p.rhsR.resize(n);
    p.rhsG.resize(n);
    p.rhsS.resize(n);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < gr.ny; j++) {
        int jp = gr.yp(j), jm = gr.ym(j);
        for (int i = 0; i < gr.nx; i++) {
            int id = gr.id(i, j);
            double ux = (u[gr.id(gr.xp(i), j)] - u[gr.id(gr.xm(i), j)]) / (2.0 * gr.hx);
            double uy = (u[gr.id(i, jp)] - u[gr.id(i, jm)]) / (2.0 * gr.hy);
            // Ric contracted twice against du: Ric^{ab} u_a u_b
            double i11 = geo.inv.a11[id], i12 = geo.inv.a12[id], i22 = geo.inv.a22[id];
            double v0 = i11 * ux + i12 * uy, v1 = i12 * ux + i22 * uy;
            double ricuu = geo.ric.a11[id] * v0 * v0 + 2.0 * geo.ric.a12[id] * v0 * v1
                         + geo.ric.a22[id] * v1 * v1;
            double du2 = lapU[id] * lapU[id];
            p.rhsR[id] = lapR[id] + 2.0 * ric2[id] + 4.0 * du2 - 4.0 * hu2[id] - 8.0 * ricuu;
            p.rhsG[id] = lapG[id] - 2.0 * hu2[id] - 4.0 * gu2[id] * gu2[id];
            p.rhsS[id] = lapS[id] + 2.0 * st2[id] + 4.0 * du2;
        }
    }
}

void residual_point(const Grid& gr, const StatePack& a, const StatePack& b, const StatePack& c,
                    double d1, double d2, double out[4]) {
    // derivative at the middle state from possibly unequal spacings
    const int n = gr.n();
    const double w1 = -d2 / (d1 * (d1 + d2));
    const double w2 = (d2 - d1) / (d1 * d2);
    const double w3 = d1 / (d2 * (d1 + d2));
    double mR = 0.0, mG = 0.0, mS = 0.0;
    for (int id = 0; id < n; id++) {
        double tR = w1 * a.R[id] + w2 * b.R[id] + w3 * c.R[id] - b.rhsR[id];
        double tG = w1 * a.gu2[id] + w2 * b.gu2[id] + w3 * c.gu2[id] - b.rhsG[id];
        double tS = w1 * a.S[id] + w2 * b.S[id] + w3 * c.S[id] - b.rhsS[id];
        mR = std::max(mR, std::abs(tR));
        mG = std::max(mG, std::abs(tG));
        mS = std::max(mS, std::abs(tS));
    }
    out[0] = mR;
    out[1] = mG;
    out[2] = mS;
    out[3] = std::abs(w1 * a.vol + w2 * b.vol + w3 * c.vol + b.intS);
}

}  // namespace

ResidualSeries evolution_residuals(const Grid& gr, const Trajectory& traj) {
    if (traj.gauge != GaugeMode::ungauged)
        throw domain_error("evolution_residuals: trajectory must be ungauged");
    if (traj.stride != 1)
        throw domain_error("evolution_residuals: trajectory must store every step");
    ResidualSeries rs;
    const int N = (int)traj.times.size();
    if (N < 3) return rs;
    StatePack pk[3];
    pack_state(gr, traj.gs[0], traj.us[0], pk[0]);
    pack_state(gr, traj.gs[1], traj.us[1], pk[1]);
    for (int k = 1; k + 1 < N; k++) {
        pack_state(gr, traj.gs[k + 1], traj.us[k + 1], pk[(k + 1) % 3]);
        double d1 = traj.times[k] - traj.times[k - 1];
        double d2 = traj.times[k + 1] - traj.times[k];
        double out[4];
        residual_point(gr, pk[(k - 1) % 3], pk[k % 3], pk[(k + 1) % 3], d1, d2, out);
        rs.t.push_back(traj.times[k]);
        rs.resR.push_back(out[0]);
        rs.resGradU.push_back(out[1]);
        rs.resS.push_back(out[2]);
        rs.resVol.push_back(out[3]);
    }
    return rs;
}

ResidualSeries evolution_residuals_streaming(const Grid& gr, const FlowState& init,
                                             double T, double dt) {
    if (T <= 0.0 || dt <= 0.0) throw config_error("evolution_residuals_streaming: bad T/dt");
    check_metric_valid(gr, init.g);
    double bound = stability_dt_bound(gr, init.g);
    if (dt > bound)
        throw config_error("evolution_residuals_streaming: dt above stability bound");

    ResidualSeries rs;
    Work w;
    Metric gn;
    Field un;
    FlowState cur = init;
    StatePack pk[3];
    pack_state(gr, cur.g, cur.u, pk[0]);
    const int nsteps = (int)std::llround(T / dt);
    for (int s = 1; s <= nsteps; s++) {
        rk4_step(gr, cur.g, cur.u, dt, GaugeMode::ungauged, w, gn, un);
        if (!metric_ok(gr, gn, un))
            throw domain_error("evolution_residuals_streaming: positivity lost");
        cur.g.a11.swap(gn.a11);
        cur.g.a12.swap(gn.a12);
        cur.g.a22.swap(gn.a22);
        cur.u.swap(un);
        cur.t += dt;
        pack_state(gr, cur.g, cur.u, pk[s % 3]);
        if (s >= 2) {
            double out[4];
            residual_point(gr, pk[(s - 2) % 3], pk[(s - 1) % 3], pk[s % 3], dt, dt, out);
            rs.t.push_back(cur.t - dt);
            rs.resR.push_back(out[0]);
            rs.resGradU.push_back(out[1]);
            rs.resS.push_back(out[2]);
            rs.resVol.push_back(out[3]);
        }
    }
    return rs;
}

double maximum_principle_bound(double smin0, double n, double t) {
    if (smin0 > 0.0 && t >= n / (2.0 * smin0))
        throw domain_error("maximum_principle_bound: t at or past blow-up time");
    return smin0 / (1.0 - (2.0 / n) * smin0 * t);
}

namespace {

void interp_metric(const Grid& gr, const Metric& a, const Metric& b, double th, Metric& out) {
    const int n = gr.n();
    if ((int)out.a11.size() != n) { out.a11.resize(n); out.a12.resize(n); out.a22.resize(n); }
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) {
        out.a11[id] = (1.0 - th) * a.a11[id] + th * b.a11[id];
        out.a12[id] = (1.0 - th) * a.a12[id] + th * b.a12[id];
        out.a22[id] = (1.0 - th) * a.a22[id] + th * b.a22[id];
    }
}

}  // namespace

ConjugateSeries conjugate_heat_solve(const Grid& gr, const Trajectory& traj, const Field& w_final) {
    const int N = (int)traj.times.size();
    if (N < 2) throw domain_error("conjugate_heat_solve: trajectory too short");
    const int n = gr.n();

    Metric inv(gr);
    Field det(n), sq(n);
    metric_inverse(gr, traj.gs[N - 1], inv, det, sq);
    for (int id = 0; id < n; id++)
        if (!(w_final[id] > 0.0)) throw domain_error("conjugate_heat_solve: w_final not positive");
    double mass0 = integrate(gr, sq, w_final);
    if (std::abs(mass0 - 1.0) > 1e-8)
        throw domain_error("conjugate_heat_solve: w_final integral differs from 1");

    ConjugateSeries cs;
    cs.t.assign(traj.times.begin(), traj.times.end());
    cs.w.assign(N, Field());
    cs.w[N - 1] = w_final;

    // cell-mass variable
    Field W(n);
    const double hh = gr.hx * gr.hy;
    for (int id = 0; id < n; id++) W[id] = w_final[id] * sq[id] * hh;

    Metric gi(gr);
    Field wtmp(n), k1(n), k2(n), k3(n), k4(n), Ws(n);

    // dW/ds = -K(g(t)) (W / m(g(t))), evaluated at t = t(s)
    auto deriv = [&](int seg, double t, const Field& Win, Field& dW) {
        double t0 = traj.times[seg], t1 = traj.times[seg + 1];
        double th = (t - t0) / (t1 - t0);
        interp_metric(gr, traj.gs[seg], traj.gs[seg + 1], th, gi);
        metric_inverse(gr, gi, inv, det, sq);
        LapCoeffs lc = lap_coeffs(gr, inv, sq);
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++) wtmp[id] = Win[id] / lc.mass[id];
        stiffness_apply(gr, lc, wtmp, dW);
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++) dW[id] = -dW[id];
    };

    for (int k = N - 1; k > 0; k--) {
        const int seg = k - 1;
        double tH = traj.times[k], tL = traj.times[k - 1];
        int parts = 1;
        for (int attempt = 0;; attempt++) {
            bool ok = true;
            Field Wtry = W;
            double dsec = (tH - tL) / parts;
            for (int p = 0; p < parts && ok; p++) {
                double t = tH - p * dsec;  // marching t downward
                deriv(seg, t, Wtry, k1);
                for (int id = 0; id < n; id++) Ws[id] = Wtry[id] + 0.5 * dsec * k1[id];
                deriv(seg, t - 0.5 * dsec, Ws, k2);
                for (int id = 0; id < n; id++) Ws[id] = Wtry[id] + 0.5 * dsec * k2[id];
                deriv(seg, t - 0.5 * dsec, Ws, k3);
                for (int id = 0; id < n; id++) Ws[id] = Wtry[id] + dsec * k3[id];
                deriv(seg, std::max(t - dsec, tL), Ws, k4);
                for (int id = 0; id < n; id++)
                    Wtry[id] += dsec / 6.0 * (k1[id] + 2.0 * k2[id] + 2.0 * k3[id] + k4[id]);
                for (int id = 0; id < n; id++)
                    if (!(Wtry[id] > 0.0 && std::isfinite(Wtry[id]))) { ok = false; break; }
            }
            if (ok) { W.swap(Wtry); break; }
            if (attempt >= 20)
                throw domain_error("conjugate_heat_solve: positivity lost at t = "
                                   + std::to_string(tL));
            parts *= 2;
        }
        metric_inverse(gr, traj.gs[k - 1], inv, det, sq);
        Field& wk = cs.w[k - 1];
        wk.resize(n);
        for (int id = 0; id < n; id++) wk[id] = W[id] / (sq[id] * hh);
    }
    return cs;
}

}  // namespace hrf
