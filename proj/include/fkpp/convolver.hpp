#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "fkpp/kernels.hpp"

namespace fkpp {

// FFT linear convolution of a length-n window against a sampled kernel.
// Values outside the window are the constants passed to apply().
class Convolver {
public:
    Convolver(const SampledKernel& kernel, std::size_t n);
    ~Convolver();
    Convolver(Convolver&&) noexcept;
    Convolver& operator=(Convolver&&) noexcept;
    Convolver(const Convolver&) = delete;
    Convolver& operator=(const Convolver&) = delete;

    void apply(std::span<const double> u, double left, double right, std::span<double> out);

    std::size_t size() const;
    std::size_t fft_size() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// smallest integer >= n whose prime factors are all in {2, 3, 5, 7}
std::size_t fast_fft_size(std::size_t n);

}  // namespace fkpp
