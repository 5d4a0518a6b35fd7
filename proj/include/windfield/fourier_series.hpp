#pragma once

#include "windfield/spectral_core.hpp"

namespace windfield::fourier {

/// Full square lattice {-M..M}^2 in row-major order, (-M,-M), (-M,-M+1),
/// ..., (M,M). Size (2M+1)^2.
spectral::FrequencyLattice grid_lattice(int M);

struct FourierOptions {
  int grid_m = 10;
  spectral::LossParams loss;
  Vec2 tau = Vec2(1.0, 1.0);
  Vec2 origin = Vec2(0.0, 0.0);
};

/// Penalized least-squares fit on the fixed full grid. The non-adaptive
/// reference spectral method.
spectral::SpectralModel train_fourier_series(const data::TimeSlice& slice,
                                             const FourierOptions& options);

}  // namespace windfield::fourier
