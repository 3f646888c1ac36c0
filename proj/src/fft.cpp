#include "rvelab/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <new>
#include <stdexcept>

namespace rvelab {

namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

template <typename T>
FftBuffer<T>::FftBuffer(std::size_t count) : size_(count) {
  void* p = fftw_malloc(sizeof(T) * (count == 0 ? 1 : count));
  if (p == nullptr) throw std::bad_alloc();
  std::memset(p, 0, sizeof(T) * count);
  data_.reset(static_cast<T*>(p));
}

template <typename T>
void FftBuffer<T>::Free::operator()(T* p) const {
  fftw_free(p);
}

template class FftBuffer<double>;
template class FftBuffer<std::complex<double>>;

RealFft::RealFft(int dim, int n, int components) : dim_(dim), n_(n), components_(components) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("FFT dimension must be 2 or 3");
  if (n < 1 || components < 1) throw std::invalid_argument("FFT size and component count must be positive");
  real_size_ = 1;
  for (int a = 0; a < dim; ++a) real_size_ *= static_cast<std::size_t>(n);
  complex_size_ = real_size_ / static_cast<std::size_t>(n) * static_cast<std::size_t>(half_n());

  int dims[3] = {n, n, n};
  FftBuffer<double> r(real_size_ * components);
  FftBuffer<std::complex<double>> c(complex_size_ * components);
  auto* cc = reinterpret_cast<fftw_complex*>(c.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  forward_plan_ = fftw_plan_many_dft_r2c(dim, dims, components, r.data(), nullptr, 1, static_cast<int>(real_size_), cc,
                                         nullptr, 1, static_cast<int>(complex_size_), FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_many_dft_c2r(dim, dims, components, cc, nullptr, 1, static_cast<int>(complex_size_),
                                         r.data(), nullptr, 1, static_cast<int>(real_size_), FFTW_ESTIMATE);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr) throw std::runtime_error("FFT planning failed");
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void RealFft::forward(const double* in, std::complex<double>* out) const {
  // r2c leaves its input untouched
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void RealFft::inverse(std::complex<double>* in, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace rvelab
