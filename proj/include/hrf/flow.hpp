#pragma once
#include "hrf/geometry.hpp"
#include <functional>
#include <string>
#include <vector>

namespace hrf {

enum class GaugeMode { ungauged, deturck };

struct FlowState {
    double t = 0.0;
    Metric g;
    Field u;
    FlowState() = default;
    explicit FlowState(const Grid& gr) : g(gr), u(gr.field()) {}
};

struct Trajectory {
    std::vector<double> times;  // snapshot times
    std::vector<Metric> gs;
    std::vector<Field> us;
    std::vector<double> step_times;  // every accepted step, including t0
    int stride = 1;
    GaugeMode gauge = GaugeMode::ungauged;
    bool blown_up = false;
    std::string note;  // filled on blow-up
};

struct EvolveOptions {
    double T = 0.0;
    double dt = 0.0;
    GaugeMode gauge = GaugeMode::deturck;
    int stride = 1;  // snapshot every stride-th accepted step
    int max_halvings = 20;
    bool check_bound = true;
    // called after the initial state (step 0) and after every accepted step
    std::function<void(int step, const FlowState&)> on_step;
};

// Throws domain_error naming the first offending node if g is not
// pointwise positive-definite and finite.
void check_metric_valid(const Grid&, const Metric& g);

// Conservative explicit-step bound:
// 0.1 * min(hx,hy)^2 * (min-node smallest eigenvalue of g)
//     / (max-node largest eigenvalue of g^{-1}).
double stability_dt_bound(const Grid&, const Metric& g);

// St_ij = Ric_ij - 2 d_iu d_ju, S = tr_g St = R - 2|grad u|^2.
void s_tensor(const Grid&, const Metric& g, const Field& u, Metric& St, Field& S);

// dg = -2 Ric + 4 du x du (+ gauge terms), du = lap u (+ advection).
void flow_rhs(const Grid&, const Metric& g, const Field& u, GaugeMode,
              Metric& dg, Field& du);

// Classical RK4 with positivity enforcement by step halving; on
// irrecoverable positivity loss returns the truncated trajectory with
// blown_up set instead of throwing.
Trajectory evolve(const Grid&, const FlowState& init, const EvolveOptions&);

struct ResidualSeries {
    std::vector<double> t;
    std::vector<double> resR, resGradU, resS;  // max-norm per interior time
    std::vector<double> resVol;                // |d/dt Vol + int S dV| per interior time
};

// Residuals of the three coupled evolution identities (time derivative of
// R, |grad u|^2 and S against their diffusion-reaction right sides),
// evaluated by centered differencing of consecutive stored states.
// Requires an ungauged, stride-1 trajectory.
ResidualSeries evolution_residuals(const Grid&, const Trajectory&);

// Same residuals computed while integrating internally with a three-state
// ring buffer; for grids too large to store a stride-1 trajectory.
ResidualSeries evolution_residuals_streaming(const Grid&, const FlowState& init,
                                             double T, double dt);

// a(t) = smin0 / (1 - (2/n) smin0 t); domain error at or past blow-up.
double maximum_principle_bound(double smin0, double n, double t);

struct ConjugateSeries {
    std::vector<double> t;   // aligned with trajectory snapshot times
    std::vector<Field> w;
};

// Backward conjugate-heat solve along a stored trajectory: w marched in
// s = T - t with the metric interpolated linearly between snapshots.
// The cell-mass variable w * m is stepped, so total mass is conserved to
// round-off.  w_final must be positive with unit integral.
ConjugateSeries conjugate_heat_solve(const Grid&, const Trajectory&, const Field& w_final);

}  // namespace hrf
