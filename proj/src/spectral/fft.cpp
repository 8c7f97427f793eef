#include "fft.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <new>

namespace codim2::detail {
namespace {

std::mutex planner_mutex;

struct PlanKey {
  Index3 resolution;
  int dim;
  auto operator<=>(const PlanKey&) const = default;
};

}  // namespace

double* alloc_real(std::size_t n) {
  auto* p = static_cast<double*>(fftw_malloc(sizeof(double) * (n ? n : 1)));
  if (!p) throw std::bad_alloc();
  return p;
}

fftw_complex* alloc_complex(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n ? n : 1)));
  if (!p) throw std::bad_alloc();
  return p;
}

void release(void* p) noexcept { fftw_free(p); }

const FftPlan& fft_plan(const TorusGrid& grid) {
  static std::map<PlanKey, std::unique_ptr<FftPlan>> cache;
  const PlanKey key{{grid.resolution(0), grid.resolution(1), grid.resolution(2)}, grid.dim()};
  std::lock_guard lock(planner_mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  const int d = grid.dim();
  int n[3];
  std::size_t real_size = 1;
  for (int a = 0; a < d; ++a) {
    n[a] = grid.resolution(a);
    real_size *= n[a];
  }
  const std::size_t complex_size = real_size / n[d - 1] * (n[d - 1] / 2 + 1);

  double* r = alloc_real(real_size);
  fftw_complex* c = alloc_complex(complex_size);
  auto plan = std::make_unique<FftPlan>();
  plan->forward = fftw_plan_dft_r2c(d, n, r, c, FFTW_ESTIMATE);
  plan->backward = fftw_plan_dft_c2r(d, n, c, r, FFTW_ESTIMATE);
  plan->real_size = real_size;
  plan->complex_size = complex_size;
  release(r);
  release(c);
  return *cache.emplace(key, std::move(plan)).first->second;
}

}  // namespace codim2::detail
