#include "hrf/entropy.hpp"
#include "hrf/spectral.hpp"
#include "hrf/errors.hpp"
#include "hrf/par.hpp"
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace hrf {

namespace {

constexpr double kDim = 2.0;
constexpr double kWFloor = 1e-300;

struct Ctx {
    Geometry geo;
    LapCoeffs lc;
    Field S;
    Ctx(const Grid& gr, const Metric& g, const Field& u)
        : geo(compute_geometry(gr, g)), lc(lap_coeffs(gr, geo.inv, geo.sq)), S(gr.field()) {
        if (det_min(geo.det) <= 0.0)
            throw domain_error("metric is not positive definite");
        coupled_scalar(gr, geo, u, S);
    }
};

// wgt = e^{-f} / pref; returns int wgt dV.  With rescale the weight is
// renormalized to unit total and fshift holds the implied shift of f.
double make_weight(const Grid&, const Ctx& c, const Field& f, double pref,
                   bool rescale, Field& wgt, double& fshift) {
    const int n = (int)f.size();
    wgt.resize(f.size());
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) wgt[id] = std::exp(-f[id]) / pref;
    double total = det_dot(wgt, c.lc.mass);
    if (rescale) {
        if (!(total > 0.0) || !std::isfinite(total))
            throw domain_error("weight integral is not positive");
        fshift = std::log(total);
        const double inv = 1.0 / total;
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++) wgt[id] *= inv;
        return 1.0;
    }
    fshift = 0.0;
    if (!(std::abs(total - 1.0) <= 1e-8))
        throw domain_error("weight normalization off by " + std::to_string(total - 1.0));
    return total;
}

// int S e^{-f} dV and the canonical gradient term 4 B(sqrt(wgt), sqrt(wgt)).
void weighted_parts(const Grid& gr, const Ctx& c, const Field& wgt,
                    double& intS, double& gradterm) {
    const int n = (int)wgt.size();
    Field q(wgt.size()), tmp(wgt.size());
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) {
        q[id] = std::sqrt(wgt[id]);
        tmp[id] = c.S[id] * wgt[id];
    }
    intS = det_dot(tmp, c.lc.mass);
    gradterm = 4.0 * dirichlet_form(gr, c.lc, q, q);
}

double cs_of_tau(double tau, int sign) {
    return sign * ((kDim / 2.0) * std::log(4.0 * M_PI * tau) + kDim);
}

void stiff_diag(const Grid& gr, const LapCoeffs& lc, Field& out) {
    const double ix2 = 1.0 / (gr.hx * gr.hx), iy2 = 1.0 / (gr.hy * gr.hy);
    const double hh = gr.hx * gr.hy;
#pragma omp parallel for schedule(static)
    for (int j = 0; j < gr.ny; j++) {
        int jm = gr.ym(j);
        for (int i = 0; i < gr.nx; i++) {
            int id = gr.id(i, j);
            out[id] = hh * ((lc.f11[id] + lc.f11[gr.id(gr.xm(i), j)]) * ix2 +
                            (lc.f22[id] + lc.f22[gr.id(i, jm)]) * iy2);
        }
    }
}

// Jacobi-preconditioned CG for (alpha K + sigma M) x = b, x starts at zero.
// Loose tolerance; this only produces descent directions.
void cg_shifted(const Grid& gr, const LapCoeffs& lc, const Field& dk,
                double alpha, double sigma, const Field& b, Field& x,
                double rtol, int maxit) {
    const int n = (int)b.size();
    x.assign(b.size(), 0.0);
    Field r = b, z(b.size()), p(b.size()), ap(b.size());
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++)
        z[id] = r[id] / (alpha * dk[id] + sigma * lc.mass[id]);
    p = z;
    double rz = det_dot(r, z);
    const double stop2 = rtol * rtol * det_dot(b, b);
    for (int k = 0; k < maxit; k++) {
        if (det_dot(r, r) <= stop2) break;
        stiffness_apply(gr, lc, p, ap);
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++)
            ap[id] = alpha * ap[id] + sigma * lc.mass[id] * p[id];
        double pq = det_dot(p, ap);
        if (!(pq > 0.0)) break;
        double a = rz / pq;
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++) {
            x[id] += a * p[id];
            r[id] -= a * ap[id];
        }
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++)
            z[id] = r[id] / (alpha * dk[id] + sigma * lc.mass[id]);
        double rz2 = det_dot(r, z);
        double beta = rz2 / rz;
        rz = rz2;
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++) p[id] = z[id] + beta * p[id];
    }
}

void check_sign(int sign) {
    if (sign != 1 && sign != -1) throw domain_error("sign must be +1 or -1");
}

void check_tau(double tau) {
    if (!(tau > 0.0)) throw domain_error("tau must be positive");
}

// J(w) = 4 tau w'Kw + sum (tau S + sign 2 ln w + cs) w^2 m.  The stiffness
// apply is used instead of the face-assembled Dirichlet form so the energy
// is bit-consistent with the gradient 8 tau Kw; the line search needs that
// consistency in its last few digits.
double wform_value(const Grid& gr, const Ctx& c, const Field& w, double tau,
                   int sign, double cs, Field& kw, Field& tmp) {
    const int n = (int)w.size();
    stiffness_apply(gr, c.lc, w, kw);
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) {
        double lw = 2.0 * std::log(std::max(w[id], kWFloor));
        tmp[id] = (tau * c.S[id] + sign * lw + cs) * w[id] * w[id] * c.lc.mass[id];
    }
    return 4.0 * tau * det_dot(w, kw) + det_sum(tmp);
}

double mass_norm(const Grid&, const Ctx& c, const Field& w, Field& tmp) {
    const int n = (int)w.size();
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) tmp[id] = w[id] * w[id];
    return std::sqrt(det_dot(tmp, c.lc.mass));
}

// Euler-Lagrange residual of the minimization in lemma form:
// r = tau (4 lap w / w - S) + sign f - sign n + nu, weighted by w^2 dV,
// plus the weighted-mean identity gap |int f w^2 dV - (n/2 - sign nu)|.
void el_residual(const Grid& gr, const Ctx& c, const Field& w, double tau,
                 double nu, int sign, double& eq1, double& eq2) {
    const int n = (int)w.size();
    Field lapw(w.size());
    laplace_beltrami(gr, c.lc, w, lapw);
    Field rr(w.size()), wt(w.size()), fw(w.size());
    const double lpref = (kDim / 2.0) * std::log(4.0 * M_PI * tau);
    // the residual is accumulated as r*w, which stays finite where the
    // positivity floor is active (lap w / w blows up, w^2 kills it)
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) {
        double wf = std::max(w[id], kWFloor);
        double f = -2.0 * std::log(wf) - lpref;
        double rw = tau * (4.0 * lapw[id] - c.S[id] * w[id])
                  + (sign * f - sign * kDim + nu) * w[id];
        wt[id] = w[id] * w[id] * c.lc.mass[id];
        rr[id] = rw * rw;
        fw[id] = f;
    }
    double sumwt = det_sum(wt);
    eq1 = std::sqrt(det_dot(rr, c.lc.mass) / sumwt);
    double Q = det_dot(fw, wt);
    eq2 = std::abs(Q - (kDim / 2.0 - sign * nu));
}

MinimizerResult mu_pm_core(const Grid& gr, const Ctx& c, const Metric& g,
                           double tau, int sign, const MinimizeOptions& opts) {
    check_tau(tau);
    check_sign(sign);
    const int n = gr.nx * gr.ny;
    const Field& m = c.lc.mass;

    Field w;
    if (opts.w0) {
        if ((int)opts.w0->size() != n) throw domain_error("start vector has wrong size");
        w = *opts.w0;
    } else {
        Field V(c.S.size());
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++) V[id] = tau * c.S[id];
        SpectralOperator op0 = assemble(gr, g, &V, 4.0 * tau);
        auto pairs = smallest_eigs(op0, 1, false);
        w = std::move(pairs[0].f);
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++) w[id] = std::abs(w[id]) + 1e-12;
    }
    Field tmp(w.size());
    {
        double nrm = mass_norm(gr, c, w, tmp);
        if (!(nrm > 0.0)) throw domain_error("start vector has zero mass norm");
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++) w[id] /= nrm;
    }

    const double cs = cs_of_tau(tau, sign);
    Field Kw(w.size()), gJ(w.size()), r(w.size()), wn(w.size()), d(w.size());
    Field dk(w.size()), q(w.size()), pd(w.size());
    Field cr(w.size()), cz(w.size()), cp(w.size()), cap(w.size());
    stiff_diag(gr, c.lc, dk);
    double Jw = wform_value(gr, c, w, tau, sign, cs, Kw, tmp);
    // nonmonotone line-search reference (max of the last few energies) with
    // a few ulps of slack: near the optimum the per-step decrease falls
    // below the resolution of J and a strict monotone rule would stall
    double hist[10];
    for (double& h : hist) h = Jw;
    int hpos = 0;
    double rn = 0.0;
    bool converged = false;
    int stagnant = 0;
    int it = 0;
    for (; it < opts.max_iters; it++) {
        stiffness_apply(gr, c.lc, w, Kw);
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++) {
            double lw = 2.0 * std::log(std::max(w[id], kWFloor));
            gJ[id] = 8.0 * tau * Kw[id] +
                     (2.0 * tau * c.S[id] * w[id] + sign * (2.0 * w[id] * lw + 2.0 * w[id]) +
                      2.0 * cs * w[id]) * m[id];
        }
        double kappa = 0.5 * det_dot(gJ, w);
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++) {
            r[id] = gJ[id] - 2.0 * kappa * m[id] * w[id];
            tmp[id] = r[id] * r[id] / m[id];
        }
        double rr2 = det_sum(tmp);
        rn = std::sqrt(rr2);
        if (rn < opts.tol) {
            converged = true;
            break;
        }

        // truncated-Newton direction: CG on the reduced Hessian
        // P (8 tau K + q M) P restricted to the constraint sphere's tangent
        // space, with Steihaug's negative-curvature exit.  q is the exact
        // zeroth-order curvature at w including the multiplier shadow; the
        // concentration regimes have near-singular or indefinite reduced
        // curvature that a fixed majorizer cannot resolve.
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++) {
            double lw = std::log(std::max(w[id], kWFloor));
            q[id] = 2.0 * tau * c.S[id] + sign * (4.0 * lw + 6.0) + 2.0 * cs - 2.0 * kappa;
        }
        double qmax = std::max(std::abs(det_min(q)), std::abs(det_max(q)));
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++)
            pd[id] = 8.0 * tau * dk[id] + std::max(q[id], 1e-2 * qmax + 1e-30) * m[id];
        auto tan_vec = [&](Field& v) {  // remove the M-normal component
#pragma omp parallel for schedule(static)
            for (int id = 0; id < n; id++) tmp[id] = v[id] * m[id];
            double cshift = det_dot(tmp, w);
#pragma omp parallel for schedule(static)
            for (int id = 0; id < n; id++) v[id] -= cshift * w[id];
        };
        auto tan_cov = [&](Field& y) {  // covector counterpart
            double cshift = det_dot(y, w);
#pragma omp parallel for schedule(static)
            for (int id = 0; id < n; id++) y[id] -= cshift * m[id] * w[id];
        };
        d.assign(n, 0.0);
        cr = r;
        double rr0 = det_dot(cr, cr);
        {
#pragma omp parallel for schedule(static)
            for (int id = 0; id < n; id++) cz[id] = cr[id] / pd[id];
            tan_vec(cz);
            cp = cz;
            double rz = det_dot(cr, cz);
            for (int k = 0; k < 200; k++) {
                if (det_dot(cr, cr) <= 1e-4 * rr0) break;
                stiffness_apply(gr, c.lc, cp, cap);
#pragma omp parallel for schedule(static)
                for (int id = 0; id < n; id++)
                    cap[id] = 8.0 * tau * cap[id] + q[id] * m[id] * cp[id];
                tan_cov(cap);
                double pq = det_dot(cp, cap);
                if (!(pq > 0.0)) {
                    if (k == 0) d = cz;
                    break;
                }
                double a = rz / pq;
#pragma omp parallel for schedule(static)
                for (int id = 0; id < n; id++) {
                    d[id] += a * cp[id];
                    cr[id] -= a * cap[id];
                }
#pragma omp parallel for schedule(static)
                for (int id = 0; id < n; id++) cz[id] = cr[id] / pd[id];
                tan_vec(cz);
                double rz2 = det_dot(cr, cz);
                double beta = rz2 / rz;
                rz = rz2;
#pragma omp parallel for schedule(static)
                for (int id = 0; id < n; id++) cp[id] = cz[id] + beta * cp[id];
            }
        }
        double slope = det_dot(r, d);
        if (!(slope > 0.0)) {
#pragma omp parallel for schedule(static)
            for (int id = 0; id < n; id++) d[id] = r[id] / m[id];
            slope = rr2;
        }

        double Jref = hist[0];
        for (double h : hist) Jref = std::max(Jref, h);
        double slack = 8.0 * std::abs(Jref) * 2.220446049250313e-16;
        double t = 1.0;
        double Jn = Jw;
        for (int bt = 0; bt < 60; bt++) {
#pragma omp parallel for schedule(static)
            for (int id = 0; id < n; id++)
                wn[id] = std::max(w[id] - t * d[id], kWFloor);
            double nrm = mass_norm(gr, c, wn, tmp);
#pragma omp parallel for schedule(static)
            for (int id = 0; id < n; id++) wn[id] /= nrm;
            Jn = wform_value(gr, c, wn, tau, sign, cs, Kw, tmp);
            if (Jn <= Jref + slack - 1e-4 * t * slope || bt > 50) break;
            t *= 0.5;
        }
        stagnant = (t < 1e-12) ? stagnant + 1 : 0;
        if (stagnant >= 5) break;
        w.swap(wn);
        Jw = Jn;
        hist[hpos] = Jw;
        hpos = (hpos + 1) % 10;
    }
    if (!converged)
        throw solver_error("entropy minimizer stalled: gradient norm " + std::to_string(rn) +
                           " above tolerance " + std::to_string(opts.tol) + " after " +
                           std::to_string(it) + " iterations at tau " + std::to_string(tau));

    MinimizerResult res;
    res.value = Jw;
    res.tau_star = tau;
    res.w_star = w;
    res.f_star.resize(w.size());
    const double lpref = (kDim / 2.0) * std::log(4.0 * M_PI * tau);
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++)
        res.f_star[id] = -2.0 * std::log(std::max(w[id], kWFloor)) - lpref;
    el_residual(gr, c, w, tau, Jw, sign, res.grad_residual, res.identity_gap);
    res.iterations = it;
    return res;
}

}  // namespace

double functional_E(const Grid& gr, const Metric& g, const Field& u, const Field& f,
                    bool rescale) {
    Ctx c(gr, g, u);
    Field wgt;
    double fshift = 0.0;
    make_weight(gr, c, f, 1.0, rescale, wgt, fshift);
    const int n = (int)f.size();
    Field tmp(f.size());
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) tmp[id] = c.S[id] * wgt[id];
    return det_dot(tmp, c.lc.mass);
}

double functional_F_k(const Grid& gr, const Metric& g, const Field& u, const Field& f,
                      double k, bool rescale) {
    if (!(k >= 1.0)) throw domain_error("family parameter must be >= 1");
    Ctx c(gr, g, u);
    Field wgt;
    double fshift = 0.0;
    make_weight(gr, c, f, 1.0, rescale, wgt, fshift);
    double intS = 0.0, gradterm = 0.0;
    weighted_parts(gr, c, wgt, intS, gradterm);
    return k * intS + gradterm;
}

double functional_F(const Grid& gr, const Metric& g, const Field& u, const Field& f,
                    bool rescale) {
    return functional_F_k(gr, g, u, f, 1.0, rescale);
}

double mu_k(const Grid& gr, const Metric& g, const Field& u, double k,
            Field* ground, const Field* warm) {
    if (!(k >= 1.0)) throw domain_error("family parameter must be >= 1");
    Ctx c(gr, g, u);
    const int n = gr.nx * gr.ny;
    Field V(c.S.size());
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) V[id] = k * c.S[id];
    SpectralOperator op = assemble(gr, g, &V, 4.0);
    EigOptions eo;
    eo.k = 1;
    if (warm) eo.warm = {warm};
    auto pairs = smallest_eigs(op, eo);
    if (ground) *ground = pairs[0].f;
    return pairs[0].value;
}

double W_plus_family(const Grid& gr, const Metric& g, const Field& u, const Field& f,
                     double tau, double k, bool rescale) {
    check_tau(tau);
    if (!(k >= 1.0)) throw domain_error("family parameter must be >= 1");
    Ctx c(gr, g, u);
    Field wgt;
    double fshift = 0.0;
    double total = make_weight(gr, c, f, 1.0, rescale, wgt, fshift);
    double intS = 0.0, gradterm = 0.0;
    weighted_parts(gr, c, wgt, intS, gradterm);
    return tau * tau * (k * intS + gradterm) + (kDim / 2.0) * k * tau * total;
}

double mu_plus(const Grid& gr, const Metric& g, const Field& u, double tau, double k,
               const Field* warm, Field* ground) {
    check_tau(tau);
    return tau * tau * mu_k(gr, g, u, k, ground, warm) + (kDim / 2.0) * k * tau;
}

double mu_plus_direct(const Grid& gr, const Metric& g, const Field& u, double tau,
                      double k, int max_iters, double tol) {
    check_tau(tau);
    if (!(k >= 1.0)) throw domain_error("family parameter must be >= 1");
    Ctx c(gr, g, u);
    const int n = gr.nx * gr.ny;
    const Field& m = c.lc.mass;
    const double t2 = tau * tau;

    // constant start has positive overlap with the positive ground state
    Field w(c.S.size(), 1.0), tmp(c.S.size());
    {
        double nrm = mass_norm(gr, c, w, tmp);
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++) w[id] /= nrm;
    }
    Field Kw(w.size()), gJ(w.size()), r(w.size()), wn(w.size()), d(w.size());
    Field dk(w.size());
    stiff_diag(gr, c.lc, dk);
    const double smax = std::max(std::abs(det_min(c.S)), std::abs(det_max(c.S)));
    const double sigma = 1.0 + 2.0 * t2 * k * smax;
    auto value = [&](const Field& x) {
        const int nn = n;
        stiffness_apply(gr, c.lc, x, Kw);
#pragma omp parallel for schedule(static)
        for (int id = 0; id < nn; id++)
            tmp[id] = k * c.S[id] * x[id] * x[id] * c.lc.mass[id];
        return t2 * (4.0 * det_dot(x, Kw) + det_sum(tmp));
    };
    double Jw = value(w);
    double hist[10];
    for (double& h : hist) h = Jw;
    int hpos = 0;
    double rn = 0.0;
    bool converged = false;
    int stagnant = 0;
    int it = 0;
    for (; it < max_iters; it++) {
        stiffness_apply(gr, c.lc, w, Kw);
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++)
            gJ[id] = t2 * (8.0 * Kw[id] + 2.0 * k * c.S[id] * w[id] * m[id]);
        double kappa = 0.5 * det_dot(gJ, w);
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++) {
            r[id] = gJ[id] - 2.0 * kappa * m[id] * w[id];
            tmp[id] = r[id] * r[id] / m[id];
        }
        double rr2 = det_sum(tmp);
        rn = std::sqrt(rr2);
        if (rn < tol) {
            converged = true;
            break;
        }
        cg_shifted(gr, c.lc, dk, 8.0 * t2, sigma, r, d, 1e-2, 200);
        double slope = det_dot(r, d);
        if (!(slope > 0.0)) {
#pragma omp parallel for schedule(static)
            for (int id = 0; id < n; id++) d[id] = r[id] / m[id];
            slope = rr2;
        }
        double Jref = hist[0];
        for (double h : hist) Jref = std::max(Jref, h);
        double slack = 8.0 * std::abs(Jref) * 2.220446049250313e-16;
        double t = 1.0;
        double Jn = Jw;
        for (int bt = 0; bt < 60; bt++) {
#pragma omp parallel for schedule(static)
            for (int id = 0; id < n; id++) wn[id] = w[id] - t * d[id];
            double nrm = mass_norm(gr, c, wn, tmp);
#pragma omp parallel for schedule(static)
            for (int id = 0; id < n; id++) wn[id] /= nrm;
            Jn = value(wn);
            if (Jn <= Jref + slack - 1e-4 * t * slope || bt > 50) break;
            t *= 0.5;
        }
        stagnant = (t < 1e-12) ? stagnant + 1 : 0;
        if (stagnant >= 5) break;
        w.swap(wn);
        Jw = Jn;
        hist[hpos] = Jw;
        hpos = (hpos + 1) % 10;
    }
    if (!converged)
        throw solver_error("direct minimization stalled: gradient norm " + std::to_string(rn));
    return Jw + (kDim / 2.0) * k * tau;
}

double W_pm(const Grid& gr, const Metric& g, const Field& u, const Field& f,
            double tau, int sign, bool rescale) {
    check_tau(tau);
    check_sign(sign);
    Ctx c(gr, g, u);
    const double pref = std::pow(4.0 * M_PI * tau, kDim / 2.0);
    Field wgt;
    double fshift = 0.0;
    make_weight(gr, c, f, pref, rescale, wgt, fshift);
    const int n = (int)f.size();
    Field w(f.size()), tmp(f.size());
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) {
        w[id] = std::sqrt(wgt[id]);
        tmp[id] = (tau * c.S[id] - sign * (f[id] + fshift) + sign * kDim) * wgt[id];
    }
    return 4.0 * tau * dirichlet_form(gr, c.lc, w, w) + det_dot(tmp, c.lc.mass);
}

double W_pm_wform(const Grid& gr, const Metric& g, const Field& u, const Field& w,
                  double tau, int sign) {
    check_tau(tau);
    check_sign(sign);
    Ctx c(gr, g, u);
    Field kw(w.size()), tmp(w.size());
    return wform_value(gr, c, w, tau, sign, cs_of_tau(tau, sign), kw, tmp);
}

MinimizerResult mu_pm(const Grid& gr, const Metric& g, const Field& u, double tau,
                      int sign, const MinimizeOptions& opts) {
    Ctx c(gr, g, u);
    return mu_pm_core(gr, c, g, tau, sign, opts);
}

MinimizerResult nu_pm(const Grid& gr, const Metric& g, const Field& u, int sign,
                      const TauSearchOptions& opts) {
    check_sign(sign);
    if (!(opts.tau_lo > 0.0) || !(opts.tau_hi > opts.tau_lo))
        throw domain_error("tau window is empty");
    Ctx c(gr, g, u);
    const double grc = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log(opts.tau_lo), b = std::log(opts.tau_hi);

    std::vector<double> keys;
    std::vector<MinimizerResult> vals;
    Field wlast;
    bool have_w = false;
    if (opts.inner.w0) {
        wlast = *opts.inner.w0;
        have_w = true;
    }
    int total_iters = 0;
    auto F = [&](double lt) {
        for (std::size_t i = 0; i < keys.size(); i++)
            if (keys[i] == lt) return (int)i;
        MinimizeOptions mo = opts.inner;
        if (have_w) mo.w0 = &wlast;
        MinimizerResult res = mu_pm_core(gr, c, g, std::exp(lt), sign, mo);
        wlast = res.w_star;
        have_w = true;
        total_iters += res.iterations;
        keys.push_back(lt);
        vals.push_back(std::move(res));
        return (int)vals.size() - 1;
    };

    double cc = b - grc * (b - a), dd = a + grc * (b - a);
    // seed evaluations in ascending tau so each warm start comes from the
    // nearest already-solved tau
    int ia = F(a);
    double fc = vals[F(cc)].value, fd = vals[F(dd)].value;
    int ib = F(b);
    double fa = vals[ia].value, fb = vals[ib].value;
    while (dd - cc > opts.xtol_log) {
        if (fc < fd) {
            b = dd;
            dd = cc;
            fd = fc;
            cc = b - grc * (b - a);
            fc = vals[F(cc)].value;
        } else {
            a = cc;
            cc = dd;
            fc = fd;
            dd = a + grc * (b - a);
            fd = vals[F(dd)].value;
        }
    }
    double lt = (fc < fd) ? cc : dd;
    MinimizerResult res = vals[F(lt)];
    bool boundary = (fa <= res.value) || (fb <= res.value);
    if (fa <= res.value) res = vals[ia];
    if (fb <= res.value) res = vals[ib];
    res.boundary_hit = boundary;
    res.iterations = total_iters;
    return res;
}

}  // namespace hrf
