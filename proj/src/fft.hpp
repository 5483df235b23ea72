#pragma once

#include <complex>
#include <span>
#include <vector>

namespace recip::detail {

enum class FftDirection { forward, backward };

// Unnormalized DFT: forward uses exp(-2*pi*i*j*k/n), backward exp(+...).
std::vector<std::complex<double>> dft(std::span<const std::complex<double>> in,
                                      FftDirection direction);

// Signed integer frequency index of DFT bin k for length n (Nyquist maps to -n/2).
inline long bin_frequency(std::size_t k, std::size_t n) {
  const auto kk = static_cast<long>(k);
  const auto nn = static_cast<long>(n);
  return 2 * kk < nn ? kk : kk - nn;
}

}  // namespace recip::detail
