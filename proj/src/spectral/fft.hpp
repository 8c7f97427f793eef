#pragma once

#include <fftw3.h>

#include <cstddef>

#include "codim2/grid.hpp"

namespace codim2::detail {

// FFTW plans for one grid shape. Executed through the new-array interface,
// so a single plan serves concurrent transforms on fftw_malloc buffers.
struct FftPlan {
  fftw_plan forward;
  fftw_plan backward;
  std::size_t real_size;
  std::size_t complex_size;
};

const FftPlan& fft_plan(const TorusGrid& grid);

double* alloc_real(std::size_t n);
fftw_complex* alloc_complex(std::size_t n);
void release(void* p) noexcept;

}  // namespace codim2::detail
