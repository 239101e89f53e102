#include "fkpp/kernels.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "fkpp/convolver.hpp"
#include "fkpp/field.hpp"

namespace fkpp {

void validate(const KernelSpec& spec) {
    if (!(spec.r > 1.0)) throw std::invalid_argument("kernel: r must exceed 1 (non-integrable tail), got " + std::to_string(spec.r));
    if (!(spec.dx > 0.0)) throw std::invalid_argument("kernel: dx must be positive");
    if (!(spec.half_width > 0.0)) throw std::invalid_argument("kernel: half_width must be positive");
    if (spec.dx >= spec.half_width) throw std::invalid_argument("kernel: dx must be smaller than half_width");
    const double cells = spec.half_width / spec.dx;
    if (std::abs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells))
        throw std::invalid_argument("kernel: half_width/dx must be an integer");
}

double kernel_constant(double r) {
    if (!(r > 1.0)) throw std::invalid_argument("kernel: r must exceed 1");
    return 0.5 * (r - 1.0);
}

double kernel_density(double r, double x) { return kernel_constant(r) * std::pow(1.0 + std::abs(x), -r); }

double kernel_bound_constant(double r) {
    const double c = kernel_constant(r);
    return std::max(c, 1.0 / c);
}

double tail_mass(double r, double R) {
    if (!(r > 1.0)) throw std::invalid_argument("tail_mass: r must exceed 1");
    if (R < 0.0) throw std::invalid_argument("tail_mass: R must be nonnegative");
    return 0.5 * std::pow(1.0 + R, 1.0 - r);
}

double SampledKernel::at(long k) const {
    const long m = static_cast<long>(half_count());
    if (k < -m || k > m) return 0.0;
    return values[static_cast<std::size_t>(k + m)];
}

double SampledKernel::weight(long k) const {
    const long m = static_cast<long>(half_count());
    if (k < -m || k > m) return 0.0;
    const double w = spec.dx * values[static_cast<std::size_t>(k + m)];
    return (k == -m || k == m) ? 0.5 * w : w;
}

double SampledKernel::discrete_mass() const {
    const long m = static_cast<long>(half_count());
    // sum from the outside in to limit round-off
    double s = 0.0;
    for (long k = m; k >= 1; --k) s += weight(k) + weight(-k);
    return s + weight(0);
}

SampledKernel make_algebraic_kernel(const KernelSpec& spec) {
    validate(spec);
    const long m = std::lround(spec.half_width / spec.dx);
    SampledKernel kernel;
    kernel.spec = spec;
    kernel.values.resize(static_cast<std::size_t>(2 * m + 1));
    for (long k = -m; k <= m; ++k)
        kernel.values[static_cast<std::size_t>(k + m)] = kernel_density(spec.r, static_cast<double>(k) * spec.dx);
    kernel.tail_mass_at_cutoff = tail_mass(spec.r, spec.half_width);

    // the kink at the origin is the only non-smooth point; absorb the quadrature defect there
    // so that the trapezoid mass plus both analytic tails is exactly one
    const double target = 1.0 - 2.0 * kernel.tail_mass_at_cutoff;
    double outer = 0.0;
    for (long k = m; k >= 1; --k) outer += kernel.weight(k) + kernel.weight(-k);
    kernel.values[static_cast<std::size_t>(m)] = (target - outer) / spec.dx;
    if (!(kernel.values[static_cast<std::size_t>(m)] > 0.0)) throw std::invalid_argument("kernel: dx too coarse to normalize");
    return kernel;
}

std::vector<double> convolve(const Field& field, const SampledKernel& kernel) {
    if (std::abs(field.grid.dx - kernel.spec.dx) > 1e-12 * kernel.spec.dx)
        throw std::invalid_argument("convolve: grid spacing does not match kernel spacing");
    Convolver conv(kernel, field.values.size());
    std::vector<double> out(field.values.size());
    conv.apply(field.values, field.left_plateau, field.right_value, out);
    return out;
}

void write_kernel_csv(const std::string& path, const SampledKernel& kernel) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "x,phi\n" << std::setprecision(17);
    const long m = static_cast<long>(kernel.half_count());
    for (long k = -m; k <= m; ++k) os << static_cast<double>(k) * kernel.spec.dx << ',' << kernel.at(k) << '\n';
}

}  // namespace fkpp
