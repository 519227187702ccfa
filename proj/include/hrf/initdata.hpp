#pragma once
#include "hrf/flow.hpp"
#include "hrf/rng.hpp"
#include <cstdint>
#include <string>

namespace hrf {

// Trigonometric sum over modes 0 < max(|kx|,|ky|) <= kmax with unit-normal
// coefficients, rescaled so the max-abs value equals amp.  Consumes 2 normals
// per mode in a fixed loop order, so streams are reproducible.
Field low_mode_field(const Grid&, Rng&, double amp, int kmax);

struct InitialDataSpec {
    std::string preset = "flat";  // flat | perturbed | conformal
    std::uint64_t seed = 0;
    double amplitude = 0.0;    // metric perturbation (or phi) scale
    double u_amplitude = -1.0; // scalar field scale; < 0 means follow amplitude
    int kmax = 2;
};

FlowState make_flat(const Grid&);

// g = identity + three independent low-mode fields (diagonal entries offset,
// off-diagonal raw), u an independent low-mode field.  Throws if the
// perturbed metric fails the positive-definiteness floor.
FlowState make_perturbed(const Grid&, std::uint64_t seed, double g_amp,
                         double u_amp, int kmax);

FlowState make_conformal(const Grid&, const Field& phi, const Field& u);

FlowState make_initial_data(const Grid&, const InitialDataSpec&);

}  // namespace hrf
