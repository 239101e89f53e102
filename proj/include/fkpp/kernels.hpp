#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fkpp {

struct Field;

struct KernelSpec {
    double r = 2.0;
    double half_width = 2000.0;
    double dx = 0.05;
};

void validate(const KernelSpec& spec);

// phi_r(x) = c_r (1+|x|)^{-r}, c_r = (r-1)/2
double kernel_constant(double r);
double kernel_density(double r, double x);
// A_phi such that A^{-1}(1+|x|)^{-r} <= phi(x) <= A(1+|x|)^{-r}
double kernel_bound_constant(double r);
// mass of phi_r on (R, inf)
double tail_mass(double r, double R);

struct SampledKernel {
    KernelSpec spec;
    // samples at k*dx for k = -m..m, stored at index k+m
    std::vector<double> values;
    double tail_mass_at_cutoff = 0.0;

    std::size_t half_count() const { return (values.size() - 1) / 2; }
    double at(long k) const;
    double density(double x) const { return kernel_density(spec.r, x); }
    // trapezoid mass of the samples over [-L, L]
    double discrete_mass() const;
    // weight of sample k in the discrete convolution sum
    double weight(long k) const;
};

SampledKernel make_algebraic_kernel(const KernelSpec& spec);

// (phi * u) on the field grid, far field taken from field.left_plateau and field.right_value
std::vector<double> convolve(const Field& field, const SampledKernel& kernel);

void write_kernel_csv(const std::string& path, const SampledKernel& kernel);

}  // namespace fkpp
