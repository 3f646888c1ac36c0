#pragma once

// Batched real-to-complex transforms on n^d grids stored x-fastest.

#include <complex>
#include <cstddef>
#include <memory>

namespace rvelab {

/// Aligned buffer from the FFT library's allocator.
template <typename T>
class FftBuffer {
 public:
  FftBuffer() = default;
  explicit FftBuffer(std::size_t count);
  FftBuffer(FftBuffer&&) noexcept = default;
  FftBuffer& operator=(FftBuffer&&) noexcept = default;

  T* data() { return data_.get(); }
  const T* data() const { return data_.get(); }
  T& operator[](std::size_t i) { return data_.get()[i]; }
  const T& operator[](std::size_t i) const { return data_.get()[i]; }
  std::size_t size() const { return size_; }

 private:
  struct Free {
    void operator()(T* p) const;
  };
  std::unique_ptr<T, Free> data_;
  std::size_t size_ = 0;
};

/// Plans for `components` interleaved-by-block fields: component c occupies
/// real entries [c*N, (c+1)*N) and complex entries [c*M, (c+1)*M), with
/// N = n^d and M = n^{d-1} (n/2 + 1). The complex half-axis is x. Inverse
/// transforms are unnormalized. Plans use estimate mode, so results are
/// reproducible run to run.
class RealFft {
 public:
  RealFft(int dim, int n, int components);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int dim() const { return dim_; }
  int n() const { return n_; }
  int components() const { return components_; }
  std::size_t real_size() const { return real_size_; }        // per component
  std::size_t complex_size() const { return complex_size_; }  // per component
  int half_n() const { return n_ / 2 + 1; }

  /// Buffers must come from FftBuffer (alignment); `in` is preserved.
  void forward(const double* in, std::complex<double>* out) const;
  /// Destroys the contents of `in`.
  void inverse(std::complex<double>* in, double* out) const;

 private:
  int dim_, n_, components_;
  std::size_t real_size_, complex_size_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace rvelab
