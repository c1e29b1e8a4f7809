#pragma once

#include <complex>
#include <span>

namespace benjamin::fft {

// In-place unnormalized complex transforms backed by FFTW.
// forward: X_j = sum_n x_n exp(-2 pi i j n / n_total); backward uses the + sign.
void forward(std::span<std::complex<double>> data);
void backward(std::span<std::complex<double>> data);

} // namespace benjamin::fft
