#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

namespace recip::detail {

namespace {
// FFTW's planner is not reentrant; execution on per-call buffers is.
std::mutex planner_mutex;
}  // namespace

std::vector<std::complex<double>> dft(std::span<const std::complex<double>> in,
                                      FftDirection direction) {
  const int n = static_cast<int>(in.size());
  std::vector<std::complex<double>> out(in.size());
  if (n == 0) return out;

  auto* buf_in = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * in.size()));
  auto* buf_out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * in.size()));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    plan = fftw_plan_dft_1d(n, buf_in, buf_out,
                            direction == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  }
  std::memcpy(buf_in, in.data(), sizeof(fftw_complex) * in.size());
  fftw_execute(plan);
  for (std::size_t k = 0; k < in.size(); ++k) out[k] = {buf_out[k][0], buf_out[k][1]};
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(plan);
  }
  fftw_free(buf_in);
  fftw_free(buf_out);
  return out;
}

}  // namespace recip::detail
