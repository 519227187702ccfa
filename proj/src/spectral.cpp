#include "hrf/spectral.hpp"
#include "hrf/errors.hpp"
#include "hrf/par.hpp"
#include "hrf/rng.hpp"
#include <cmath>
#include <algorithm>
#include <string>

namespace hrf {

SpectralOperator assemble(const Grid& gr, const Metric& g, const Field* V, double a) {
    if (a <= 0.0) throw domain_error("assemble: scale must be positive");
    const int n = gr.n();
    for (int id = 0; id < n; id++) {
        double p = g.a11[id], q = g.a12[id], r = g.a22[id];
        if (!(std::isfinite(p) && std::isfinite(q) && std::isfinite(r))
            || p <= 0.0 || p * r - q * q <= 0.0)
            throw domain_error("assemble: metric not positive-definite");
    }
    SpectralOperator op;
    op.gr = &gr;
    op.a = a;
    Metric inv(gr);
    Field det(n), sq(n);
    metric_inverse(gr, g, inv, det, sq);
    op.lc = lap_coeffs(gr, inv, sq);
    if (V) op.V = *V;
    op.diagA.resize(n);
    const double hh = gr.hx * gr.hy;
#pragma omp parallel for schedule(static)
    for (int j = 0; j < gr.ny; j++) {
        int jm = gr.ym(j);
        for (int i = 0; i < gr.nx; i++) {
            int id = gr.id(i, j);
            int idxm = gr.id(gr.xm(i), j), idym = gr.id(i, jm);
            double dk = hh * ((op.lc.f11[id] + op.lc.f11[idxm]) / (gr.hx * gr.hx)
                            + (op.lc.f22[id] + op.lc.f22[idym]) / (gr.hy * gr.hy));
            op.diagA[id] = a * dk + (V ? op.V[id] * op.lc.mass[id] : 0.0);
        }
    }
    return op;
}

void op_apply(const SpectralOperator& op, const Field& x, Field& y) {
    const Grid& gr = *op.gr;
    stiffness_apply(gr, op.lc, x, y);
    const int n = gr.n();
    const bool haveV = !op.V.empty();
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) {
        y[id] *= op.a;
        if (haveV) y[id] += op.V[id] * op.lc.mass[id] * x[id];
    }
}

double rayleigh(const SpectralOperator& op, const Field& f) {
    const int n = op.gr->n();
    Field y(n);
    op_apply(op, f, y);
    double num = det_dot(f, y);
    Field mf(n);
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) mf[id] = op.lc.mass[id] * f[id];
    double den = det_dot(f, mf);
    return num / den;
}

namespace {

double mass_dot(const Field& mass, const Field& x, const Field& y, Field& tmp) {
    const int n = (int)x.size();
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) tmp[id] = mass[id] * y[id];
    return det_dot(x, tmp);
}

// B = a K + diag((V - sigma) m), SPD for sigma strictly below the spectrum
// (or PSD with constant kernel for the deflated Laplacian).
struct Shifted {
    const SpectralOperator* op;
    double sigma;
    void apply(const Field& x, Field& y) const {
        op_apply(*op, x, y);
        const int n = (int)x.size();
        const Field& m = op->lc.mass;
        const double s = sigma;
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++) y[id] -= s * m[id] * x[id];
    }
};

int cg_solve(const Shifted& B, const Field& b, Field& x, double reltol, int maxit) {
    const int n = (int)b.size();
    const Field& dA = B.op->diagA;
    const Field& m = B.op->lc.mass;
    const double s = B.sigma;
    Field r(n), z(n), p(n), q(n);
    B.apply(x, r);
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) r[id] = b[id] - r[id];
    double bnorm = std::sqrt(det_dot(b, b));
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return 0;
    }
    auto precond = [&](const Field& rin, Field& zout) {
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++) zout[id] = rin[id] / (dA[id] - s * m[id]);
    };
    precond(r, z);
    p = z;
    double rz = det_dot(r, z);
    int it = 0;
    for (; it < maxit; it++) {
        if (std::sqrt(det_dot(r, r)) <= reltol * bnorm) break;
        B.apply(p, q);
        double pq = det_dot(p, q);
        if (!(pq > 0.0)) break;  // curvature guard on the PSD case
        double alpha = rz / pq;
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++) {
            x[id] += alpha * p[id];
            r[id] -= alpha * q[id];
        }
        precond(r, z);
        double rz2 = det_dot(r, z);
        double beta = rz2 / rz;
        rz = rz2;
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++) p[id] = z[id] + beta * p[id];
    }
    return it;
}

}  // namespace

std::vector<EigenPair> smallest_eigs(const SpectralOperator& op, const EigOptions& opt) {
    const Grid& gr = *op.gr;
    const int n = gr.n();
    const Field& mass = op.lc.mass;
    const bool haveV = !op.V.empty();

    // Shift strictly below the spectrum.  The offset is proportional to the
    // operator scale (potential spread plus a Gershgorin bound on the
    // stiffness part) so that inverse iteration keeps a useful convergence
    // ratio on operators whose whole spectrum is tiny (e.g. tau-scaled
    // potentials or uniformly rescaled metrics).
    double sigma = 0.0, vmin = 0.0;
    if (haveV) {
        vmin = det_min(op.V);
        double vmax = det_max(op.V);
        double kd = 0.0;
        for (int id = 0; id < n; id++)
            kd = std::max(kd, op.diagA[id] / mass[id] - op.V[id]);
        sigma = vmin - 3e-5 * ((vmax - vmin) + 2.0 * kd);
    }

    std::vector<EigenPair> out;
    std::vector<Field> defl;  // M-orthonormal constraint set
    Field tmp(n);

    double volm = det_sum(mass);
    if (opt.deflate_constants || (!haveV && !opt.deflate_constants)) {
        Field c(n, 1.0 / std::sqrt(volm));
        if (!haveV && !opt.deflate_constants) {
            // exact kernel pair of the pure stiffness pencil
            EigenPair pr;
            pr.value = 0.0;
            pr.f = c;
            Field y(n);
            op_apply(op, c, y);
            double acc = 0.0;
            for (int id = 0; id < n; id++) {
                double r = y[id] / mass[id];
                acc += r * r * mass[id];
            }
            pr.residual = std::sqrt(acc);
            out.push_back(pr);
        }
        defl.push_back(std::move(c));
    }

    auto project = [&](Field& x) {
        for (const Field& d : defl) {
            double c = mass_dot(mass, d, x, tmp);
#pragma omp parallel for schedule(static)
            for (int id = 0; id < n; id++) x[id] -= c * d[id];
        }
    };

    Field v(n), x(n), Ax(n), res(n);
    const int want = opt.k;
    while ((int)out.size() < want) {
        int pidx = (int)out.size();
        const Field* w0 =
            (pidx < (int)opt.warm.size() && opt.warm[pidx]) ? opt.warm[pidx] : nullptr;
        if (w0) v = *w0;
        else {
            Rng rng(12345u + 977u * (unsigned)pidx);
            for (int id = 0; id < n; id++) v[id] = rng.normal();
        }
        project(v);
        double nv = std::sqrt(mass_dot(mass, v, v, tmp));
        if (!(nv > 1e-12)) {  // degenerate warm start, fall back to noise
            Rng rng(54321u + 131u * (unsigned)pidx);
            for (int id = 0; id < n; id++) v[id] = rng.normal();
            project(v);
            nv = std::sqrt(mass_dot(mass, v, v, tmp));
        }
#pragma omp parallel for schedule(static)
        for (int id = 0; id < n; id++) v[id] /= nv;

        Shifted B{&op, sigma};
        x = v;
        double lambda = 0.0, rnorm = 0.0;
        int it = 0;
        bool done = false;
        Field rhs(n);
        for (it = 1; it <= opt.max_iters; it++) {
#pragma omp parallel for schedule(static)
            for (int id = 0; id < n; id++) rhs[id] = mass[id] * v[id];
            cg_solve(B, rhs, x, 1e-13, 20 * n);
            project(x);
            double nx = std::sqrt(mass_dot(mass, x, x, tmp));
            if (!(nx > 0.0)) throw solver_error("smallest_eigs: iterate collapsed");
#pragma omp parallel for schedule(static)
            for (int id = 0; id < n; id++) x[id] /= nx;
            op_apply(op, x, Ax);
            Field mx(n);
#pragma omp parallel for schedule(static)
            for (int id = 0; id < n; id++) mx[id] = mass[id] * x[id];
            lambda = det_dot(x, Ax) / det_dot(x, mx);
            double acc = 0.0;
            for (int id = 0; id < n; id++) {
                double r = (Ax[id] - lambda * mx[id]) / mass[id];
                acc += r * r * mass[id];
            }
            rnorm = std::sqrt(acc);
            v = x;
            if (rnorm <= opt.tol) { done = true; break; }
        }
        if (!done)
            throw solver_error("smallest_eigs: no convergence after "
                               + std::to_string(opt.max_iters)
                               + " iterations, residual " + std::to_string(rnorm));
        double floorv = haveV ? vmin : 0.0;
        if (lambda < floorv - 1e-7 * std::max(1.0, std::abs(floorv)))
            throw solver_error("smallest_eigs: eigenvalue below the variational bound");
        double nsum = det_sum(x);
        if (nsum < 0.0) {
#pragma omp parallel for schedule(static)
            for (int id = 0; id < n; id++) x[id] = -x[id];
        }
        EigenPair pr;
        pr.value = lambda;
        pr.f = x;
        pr.residual = rnorm;
        pr.iterations = it;
        out.push_back(pr);
        defl.push_back(x);
    }
    std::sort(out.begin(), out.end(),
              [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });
    return out;
}

std::vector<EigenPair> smallest_eigs(const SpectralOperator& op, int k, bool deflate_constants) {
    EigOptions o;
    o.k = k;
    o.deflate_constants = deflate_constants;
    return smallest_eigs(op, o);
}

double lambda_dot_laplacian(const Grid& gr, const Metric& g, const Field& u,
                            double lambda, const Field& f) {
    const int n = gr.n();
    SpectralOperator op = assemble(gr, g, nullptr, 1.0);
    Field Af(n);
    op_apply(op, f, Af);
    double acc = 0.0, fnorm2 = 0.0;
    for (int id = 0; id < n; id++) {
        double r = (Af[id] - lambda * op.lc.mass[id] * f[id]) / op.lc.mass[id];
        acc += r * r * op.lc.mass[id];
        fnorm2 += f[id] * f[id] * op.lc.mass[id];
    }
    if (std::sqrt(acc / fnorm2) > 1e-6)
        throw domain_error("lambda_dot_laplacian: (lambda, f) is not an eigenpair");

    Geometry geo = compute_geometry(gr, g);
    Metric St(gr);
    Field S(n);
    coupled_curvature(gr, geo, u, St, S);

    Field t1(n), t2(n), t3(n);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < gr.ny; j++) {
        int jp = gr.yp(j), jm = gr.ym(j);
        for (int i = 0; i < gr.nx; i++) {
            int id = gr.id(i, j);
            double fx = (f[gr.id(gr.xp(i), j)] - f[gr.id(gr.xm(i), j)]) / (2.0 * gr.hx);
            double fy = (f[gr.id(i, jp)] - f[gr.id(i, jm)]) / (2.0 * gr.hy);
            double i11 = geo.inv.a11[id], i12 = geo.inv.a12[id], i22 = geo.inv.a22[id];
            double v0 = i11 * fx + i12 * fy, v1 = i12 * fx + i22 * fy;
            double gradf2 = fx * v0 + fy * v1;
            double stdf = St.a11[id] * v0 * v0 + 2.0 * St.a12[id] * v0 * v1
                        + St.a22[id] * v1 * v1;
            t1[id] = S[id] * f[id] * f[id];
            t2[id] = S[id] * gradf2;
            t3[id] = stdf;
        }
    }
    double num = lambda * integrate(gr, geo.sq, t1) - integrate(gr, geo.sq, t2)
               + 2.0 * integrate(gr, geo.sq, t3);
    Field f2(n);
    for (int id = 0; id < n; id++) f2[id] = f[id] * f[id];
    double den = integrate(gr, geo.sq, f2);
    return num / den;
}

void lambda_dot_guc(const Grid& gr, const Metric& g, const Field& u, const Field& f,
                    double& rateA, double& rateB) {
    const int n = gr.n();
    if (det_min(f) <= 0.0)
        throw domain_error("lambda_dot_guc: ground state must be strictly positive");

    Geometry geo = compute_geometry(gr, g);
    LapCoeffs lc = lap_coeffs(gr, geo.inv, geo.sq);
    Metric St(gr);
    Field S(n);
    coupled_curvature(gr, geo, u, St, S);

    Field lapU(n), gu2(n), lapGu2(n);
    laplace_beltrami(gr, lc, u, lapU);
    gradient_squared(gr, geo.inv, u, gu2);
    laplace_beltrami(gr, lc, gu2, lapGu2);

    Field st2(n);
    tensor_norm2(gr, geo.inv, St, st2);

    Field phi(n);
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; id++) phi[id] = -2.0 * std::log(f[id]);
    Metric Hphi(gr), Hu(gr);
    hessian(gr, geo.gam, phi, Hphi);
    hessian(gr, geo.gam, u, Hu);
    Field hu2(n);
    tensor_norm2(gr, geo.inv, Hu, hu2);

    Metric SH(gr), S4(gr);
    Field iA(n);  // reusable integrand
#pragma omp parallel for schedule(static)
    for (int j = 0; j < gr.ny; j++) {
        int jp = gr.yp(j), jm = gr.ym(j);
        for (int i = 0; i < gr.nx; i++) {
            int id = gr.id(i, j);
            double ux = (u[gr.id(gr.xp(i), j)] - u[gr.id(gr.xm(i), j)]) / (2.0 * gr.hx);
            double uy = (u[gr.id(i, jp)] - u[gr.id(i, jm)]) / (2.0 * gr.hy);
            double fx = (f[gr.id(gr.xp(i), j)] - f[gr.id(gr.xm(i), j)]) / (2.0 * gr.hx);
            double fy = (f[gr.id(i, jp)] - f[gr.id(i, jm)]) / (2.0 * gr.hy);
            SH.a11[id] = St.a11[id] + Hphi.a11[id];
            SH.a12[id] = St.a12[id] + Hphi.a12[id];
            SH.a22[id] = St.a22[id] + Hphi.a22[id];
            S4.a11[id] = St.a11[id] + 4.0 * ux * ux;
            S4.a12[id] = St.a12[id] + 4.0 * ux * uy;
            S4.a22[id] = St.a22[id] + 4.0 * uy * uy;
            double i11 = geo.inv.a11[id], i12 = geo.inv.a12[id], i22 = geo.inv.a22[id];
            double v0 = i11 * fx + i12 * fy, v1 = i12 * fx + i22 * fy;
            double stdf = St.a11[id] * v0 * v0 + 2.0 * St.a12[id] * v0 * v1
                        + St.a22[id] * v1 * v1;
            iA[id] = 2.0 * stdf
                   + f[id] * f[id] * (st2[id] + 2.0 * lapU[id] * lapU[id]);
        }
    }
    rateA = integrate(gr, geo.sq, iA);

    Field sh2(n), s42(n);
    tensor_norm2(gr, geo.inv, SH, sh2);
    tensor_norm2(gr, geo.inv, S4, s42);
    Field iB(n);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < gr.ny; j++) {
        int jp = gr.yp(j), jm = gr.ym(j);
        for (int i = 0; i < gr.nx; i++) {
            int id = gr.id(i, j);
            double ux = (u[gr.id(gr.xp(i), j)] - u[gr.id(gr.xm(i), j)]) / (2.0 * gr.hx);
            double uy = (u[gr.id(i, jp)] - u[gr.id(i, jm)]) / (2.0 * gr.hy);
            double px = (phi[gr.id(gr.xp(i), j)] - phi[gr.id(gr.xm(i), j)]) / (2.0 * gr.hx);
            double py = (phi[gr.id(i, jp)] - phi[gr.id(i, jm)]) / (2.0 * gr.hy);
            double i11 = geo.inv.a11[id], i12 = geo.inv.a12[id], i22 = geo.inv.a22[id];
            double dudphi = i11 * ux * px + i12 * (ux * py + uy * px) + i22 * uy * py;
            double w = f[id] * f[id];
            iB[id] = (0.5 * sh2[id] + 0.25 * st2[id] + dudphi * dudphi
                      + 2.0 * hu2[id] + 0.25 * s42[id] - lapGu2[id]) * w;
        }
    }
    rateB = integrate(gr, geo.sq, iB);
}

}  // namespace hrf
