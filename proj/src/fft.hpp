#pragma once

#include <complex>
#include <span>
#include <vector>

namespace chebrb::detail {

/// Forward complex DFT, sum_m x_m exp(-2 pi i k m / n). Backed by FFTW with
/// one cached plan per length; safe to call from several threads.
std::vector<std::complex<double>> fft(std::span<const std::complex<double>> input);

}  // namespace chebrb::detail
