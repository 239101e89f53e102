#include "fkpp/convolver.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace fkpp {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

template <class T>
struct FftwBuffer {
    T* data = nullptr;
    explicit FftwBuffer(std::size_t n) : data(static_cast<T*>(fftw_malloc(sizeof(T) * n))) {
        if (!data) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

}  // namespace

std::size_t fast_fft_size(std::size_t n) {
    for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
        std::size_t k = m;
        for (std::size_t p : {2u, 3u, 5u, 7u})
            while (k % p == 0) k /= p;
        if (k == 1) return m;
    }
}

struct Convolver::Impl {
    std::size_t n;
    std::size_t m_eff;
    std::size_t nfft;
    double far_mass;
    FftwBuffer<double> real;
    FftwBuffer<fftw_complex> spec;
    std::vector<std::complex<double>> kernel_hat;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    Impl(const SampledKernel& kernel, std::size_t n_)
        : n(n_),
          m_eff(std::min(kernel.half_count(), n_ - 1)),
          nfft(fast_fft_size(n_ + 2 * m_eff)),
          far_mass(0.0),
          real(nfft),
          spec(nfft / 2 + 1) {
        {
            std::lock_guard<std::mutex> lock(planner_mutex());
            forward = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), real.data, spec.data, FFTW_ESTIMATE);
            backward = fftw_plan_dft_c2r_1d(static_cast<int>(nfft), spec.data, real.data, FFTW_ESTIMATE);
        }
        if (!forward || !backward) throw std::runtime_error("convolver: FFT planning failed");

        const long me = static_cast<long>(m_eff);
        std::fill(real.data, real.data + nfft, 0.0);
        double inner = 0.0;
        for (long k = me; k >= 1; --k) inner += kernel.weight(k) + kernel.weight(-k);
        inner += kernel.weight(0);
        for (long q = 0; q <= 2 * me; ++q) real.data[q] = kernel.weight(q - me);
        far_mass = 0.5 * (1.0 - inner);

        fftw_execute(forward);
        kernel_hat.resize(nfft / 2 + 1);
        const double scale = 1.0 / static_cast<double>(nfft);
        for (std::size_t j = 0; j < kernel_hat.size(); ++j)
            kernel_hat[j] = std::complex<double>(spec.data[j][0], spec.data[j][1]) * scale;
    }

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }

    void apply(std::span<const double> u, double left, double right, std::span<double> out) {
        if (u.size() != n || out.size() != n) throw std::invalid_argument("convolver: size mismatch");
        double* s = real.data;
        std::fill(s, s + m_eff, left);
        std::copy(u.begin(), u.end(), s + m_eff);
        std::fill(s + m_eff + n, s + n + 2 * m_eff, right);
        std::fill(s + n + 2 * m_eff, s + nfft, 0.0);

        fftw_execute(forward);
        for (std::size_t j = 0; j < kernel_hat.size(); ++j) {
            const std::complex<double> z = std::complex<double>(spec.data[j][0], spec.data[j][1]) * kernel_hat[j];
            spec.data[j][0] = z.real();
            spec.data[j][1] = z.imag();
        }
        fftw_execute(backward);

        const double far = far_mass * (left + right);
        bool nonnegative = left >= 0.0 && right >= 0.0;
        for (double v : u) nonnegative = nonnegative && v >= 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = s[i + 2 * m_eff] + far;
            out[i] = (nonnegative && v < 0.0) ? 0.0 : v;
        }
    }
};

Convolver::Convolver(const SampledKernel& kernel, std::size_t n) {
    if (n < 1) throw std::invalid_argument("convolver: empty window");
    impl_ = std::make_unique<Impl>(kernel, n);
}

Convolver::~Convolver() = default;
Convolver::Convolver(Convolver&&) noexcept = default;
Convolver& Convolver::operator=(Convolver&&) noexcept = default;

void Convolver::apply(std::span<const double> u, double left, double right, std::span<double> out) {
    impl_->apply(u, left, right, out);
}

std::size_t Convolver::size() const { return impl_->n; }
std::size_t Convolver::fft_size() const { return impl_->nfft; }

}  // namespace fkpp
