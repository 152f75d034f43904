#pragma once

#include <functional>
#include <span>
#include <vector>

#include "decaylab/grid.hpp"

namespace decaylab {

/// Standard periodic wavenumbers 2 pi j / L along `axis`, with j in [-N/2, N/2).
std::vector<double> wavenumbers(const GridSpec& grid, int axis);

/// True for the unpaired mode j = -N/2 of an even-length axis.
bool is_nyquist(const GridSpec& grid, int axis, std::size_t index);

/// Unnormalized forward DFT (exp(-i k x) kernel) of grid-shaped data.
std::vector<cplx> fft_forward(const GridSpec& grid, std::span<const cplx> values);
/// Inverse of fft_forward, including the 1/N factor.
std::vector<cplx> fft_inverse(const GridSpec& grid, std::span<const cplx> spectrum);

using Multiplier = std::function<cplx(double k0, double k1)>;

/// Transform, multiply mode-wise by m(k), transform back.
SampledField apply_multiplier(const SampledField& field, const Multiplier& m);

/// Fourier derivative of the given order along `axis` (order <= 6). For odd orders the
/// Nyquist mode is dropped so real fields stay real.
SampledField spectral_derivative(const SampledField& field, int order, int axis = 0);

/// L^2 norm evaluated on the wavenumber side via Parseval.
double l2_norm_spectral(const SampledField& field);

}  // namespace decaylab
