#pragma once

// Seeded generators for interior and on-surface phase points. Used by the
// verification suite and the tests; deterministic for a given seed.

#include "qcons/models.hpp"

#include <random>

namespace qcons {

using Rng = std::mt19937_64;

/// Uniform-ish interior point: every p_i and p_n at least `margin`.
PhasePoint random_interior_point(int n_levels, Rng& rng, double margin = 0.02);

/// Point on the model's constraint surface (max |Phi| at round-off level).
///   two-spin product:  p2, p3 drawn, p1 solved from p1 p4 = p2 p3, q1 = q2 + q3
///   three-spin product: product of three random spinors
///   disentangled:      random sphere pair pushed through the inverse basis map,
///                      resampled until p1 p4 > min_p1p4
///   unconstrained:     random interior point
PhasePoint sample_on_surface(ModelId model, Rng& rng, int n_levels = 4, double min_p1p4 = 1e-4);

/// Spectrum {e1, e2, -e2, -e1} for the two-spin model, or +-a +-b +-c
/// ordered by the three-spin level labelling for the three-spin model.
EnergySpectrum random_condition_spectrum(ModelId model, Rng& rng);

/// Random levels for n, with gaps bounded away from zero.
EnergySpectrum random_generic_spectrum(int n_levels, Rng& rng);

}  // namespace qcons
