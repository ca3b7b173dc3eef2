#pragma once

#include <complex>
#include <span>

namespace synthrf::dsp {

using Complex = std::complex<double>;

// Thin wrappers over FFTW. Plans are created once per (size, direction) and
// cached; plan creation is serialized, execution is reentrant.

/// In-place forward transform, no scaling.
void fft_in_place(std::span<Complex> data);

/// In-place inverse transform scaled by 1/N.
void ifft_in_place(std::span<Complex> data);

}  // namespace synthrf::dsp
