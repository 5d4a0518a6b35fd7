#include "windfield/fourier_series.hpp"

#include "windfield/errors.hpp"

namespace windfield::fourier {

spectral::FrequencyLattice grid_lattice(int M) {
  if (M < 0) throw ConfigError("grid half-width must be non-negative");
  spectral::FrequencyLattice lattice;
  lattice.reserve(static_cast<std::size_t>(2 * M + 1) *
                  static_cast<std::size_t>(2 * M + 1));
  for (int m1 = -M; m1 <= M; ++m1) {
    for (int m2 = -M; m2 <= M; ++m2) {
      lattice.push_back(LatticePoint{m1, m2});
    }
  }
  return lattice;
}

spectral::SpectralModel train_fourier_series(const data::TimeSlice& slice,
                                             const FourierOptions& options) {
  options.loss.validate();
  return fit_spectral_model(slice, grid_lattice(options.grid_m), options.loss,
                            options.tau, options.origin);
}

}  // namespace windfield::fourier
