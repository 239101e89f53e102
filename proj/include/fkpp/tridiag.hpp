#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fkpp {

// Tridiagonal matrix stored by diagonals. lower[0] and upper[n-1] are unused.
struct Tridiagonal {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;

    Tridiagonal() = default;
    explicit Tridiagonal(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}

    std::size_t size() const { return diag.size(); }

    // out = A * x
    void multiply(std::span<const double> x, std::span<double> out) const {
        const std::size_t n = size();
        if (n == 0) return;
        if (n == 1) {
            out[0] = diag[0] * x[0];
            return;
        }
        out[0] = diag[0] * x[0] + upper[0] * x[1];
        for (std::size_t i = 1; i + 1 < n; ++i)
            out[i] = lower[i] * x[i - 1] + diag[i] * x[i] + upper[i] * x[i + 1];
        out[n - 1] = lower[n - 1] * x[n - 2] + diag[n - 1] * x[n - 1];
    }
};

// Thomas-algorithm factorization, reusable for repeated solves with the same matrix.
class TridiagonalLU {
public:
    TridiagonalLU() = default;

    explicit TridiagonalLU(const Tridiagonal& a) : lower_(a.lower), inv_pivot_(a.size()), upper_(a.size()) {
        const std::size_t n = a.size();
        if (n == 0) throw std::invalid_argument("tridiagonal: empty matrix");
        double pivot = a.diag[0];
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) pivot = a.diag[i] - a.lower[i] * upper_[i - 1];
            if (!(std::abs(pivot) > 0.0) || !std::isfinite(pivot))
                throw std::runtime_error("tridiagonal solve failed: zero pivot at row " + std::to_string(i));
            inv_pivot_[i] = 1.0 / pivot;
            upper_[i] = (i + 1 < n) ? a.upper[i] * inv_pivot_[i] : 0.0;
        }
    }

    std::size_t size() const { return inv_pivot_.size(); }

    // Solves in place: on entry rhs, on exit the solution.
    void solve(std::span<double> x) const {
        const std::size_t n = size();
        x[0] *= inv_pivot_[0];
        for (std::size_t i = 1; i < n; ++i) x[i] = (x[i] - lower_[i] * x[i - 1]) * inv_pivot_[i];
        for (std::size_t i = n - 1; i-- > 0;) x[i] -= upper_[i] * x[i + 1];
    }

private:
    std::vector<double> lower_;
    std::vector<double> inv_pivot_;
    std::vector<double> upper_;
};

}  // namespace fkpp
