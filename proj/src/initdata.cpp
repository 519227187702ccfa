#include "hrf/initdata.hpp"
#include "hrf/errors.hpp"
#include <cmath>
#include <cstdio>

namespace hrf {

Field low_mode_field(const Grid& gr, Rng& rng, double amp, int kmax) {
    Field f = gr.field();
    if (kmax < 1) throw config_error("mode cutoff must be >= 1");
    for (int kx = -kmax; kx <= kmax; ++kx)
        for (int ky = -kmax; ky <= kmax; ++ky) {
            if (kx == 0 && ky == 0) continue;
            double a = rng.normal(), b = rng.normal();
            for (int j = 0; j < gr.ny; ++j)
                for (int i = 0; i < gr.nx; ++i) {
                    double ph = 2.0 * M_PI * (kx * gr.x(i) / gr.Lx + ky * gr.y(j) / gr.Ly);
                    f[gr.id(i, j)] += a * std::cos(ph) + b * std::sin(ph);
                }
        }
    double mx = 0.0;
    for (double v : f) mx = std::max(mx, std::fabs(v));
    double s = amp / std::max(1e-30, mx);
    for (double& v : f) v *= s;
    return f;
}

FlowState make_flat(const Grid& gr) {
    FlowState st(gr);
    for (int id = 0; id < gr.n(); ++id) {
        st.g.a11[id] = 1.0;
        st.g.a12[id] = 0.0;
        st.g.a22[id] = 1.0;
    }
    return st;
}

FlowState make_perturbed(const Grid& gr, std::uint64_t seed, double g_amp,
                         double u_amp, int kmax) {
    Rng rng(seed);
    Field p11 = low_mode_field(gr, rng, g_amp, kmax);
    Field p12 = low_mode_field(gr, rng, g_amp, kmax);
    Field p22 = low_mode_field(gr, rng, g_amp, kmax);
    FlowState st(gr);
    st.u = low_mode_field(gr, rng, u_amp, kmax);
    for (int id = 0; id < gr.n(); ++id) {
        st.g.a11[id] = 1.0 + p11[id];
        st.g.a12[id] = p12[id];
        st.g.a22[id] = 1.0 + p22[id];
    }
    // smallest eigenvalue floor keeps the data comfortably elliptic
    double floor = 0.1;
    for (int id = 0; id < gr.n(); ++id) {
        double tr = st.g.a11[id] + st.g.a22[id];
        double det = st.g.a11[id] * st.g.a22[id] - st.g.a12[id] * st.g.a12[id];
        double disc = std::sqrt(std::max(0.25 * tr * tr - det, 0.0));
        if (0.5 * tr - disc < floor) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "perturbation amplitude %.3g too large for positive-definite metric "
                          "(min eigenvalue %.3g at node %d)",
                          g_amp, 0.5 * tr - disc, id);
            throw domain_error(buf);
        }
    }
    return st;
}

FlowState make_conformal(const Grid& gr, const Field& phi, const Field& u) {
    if ((int)phi.size() != gr.n() || (int)u.size() != gr.n())
        throw domain_error("conformal data fields must match the grid");
    FlowState st(gr);
    conformal_metric(gr, phi, st.g);
    st.u = u;
    return st;
}

FlowState make_initial_data(const Grid& gr, const InitialDataSpec& spec) {
    if (spec.preset == "flat") return make_flat(gr);
    if (spec.preset == "perturbed") {
        double ua = spec.u_amplitude < 0.0 ? spec.amplitude : spec.u_amplitude;
        return make_perturbed(gr, spec.seed, spec.amplitude, ua, spec.kmax);
    }
    if (spec.preset == "conformal") {
        Field phi = gr.field(), u = gr.field();
        double ua = spec.u_amplitude < 0.0 ? spec.amplitude : spec.u_amplitude;
        for (int j = 0; j < gr.ny; ++j)
            for (int i = 0; i < gr.nx; ++i) {
                int id = gr.id(i, j);
                double sx = std::sin(2.0 * M_PI * gr.x(i) / gr.Lx);
                double sy = std::sin(2.0 * M_PI * gr.y(j) / gr.Ly);
                phi[id] = spec.amplitude * sx * sy;
                u[id] = ua * sx;
            }
        return make_conformal(gr, phi, u);
    }
    throw config_error("unknown initial-data preset: " + spec.preset);
}

}  // namespace hrf
