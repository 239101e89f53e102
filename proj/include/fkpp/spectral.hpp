#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "fkpp/tridiag.hpp"

namespace fkpp {

// M_eps = -d^2/dy^2 + y^2/16 - 3/4 + eps (y/8 + eps/16) on (0, Y), Dirichlet at both ends,
// discretized on the interior points y_i = i dy, i = 1..n
struct SelfSimilarOperator {
    double epsilon = 0.0;
    double Y = 40.0;
    double dy = 1e-3;
    std::vector<double> y;
    std::vector<double> potential;
    Tridiagonal matrix;

    std::size_t size() const { return y.size(); }
};

SelfSimilarOperator assemble_operator(double epsilon, double Y = 40.0, double dy = 1e-3);

// (2 sqrt(pi))^{-1/2} y e^{-y^2/8}
double psi_exact(double y);
double psi_exact_dd(double y);

struct EigenResult {
    double epsilon = 0.0;
    double lambda_eps = 0.0;
    double mu_eps = 0.0;
    std::vector<double> y;
    std::vector<double> psi_eps;  // unit discrete L2 norm, positive
};

// number of eigenvalues of the symmetric tridiagonal matrix below x
std::size_t sturm_count(const Tridiagonal& a, double x);
// k-th smallest eigenvalue (k = 0, 1, ...) by Sturm bisection
double tridiagonal_eigenvalue(const Tridiagonal& a, std::size_t k, double tol = 1e-13);

EigenResult principal_eigs(const SelfSimilarOperator& op);

// discrete L2 inner product and norm on the interior grid
double inner(const std::vector<double>& a, const std::vector<double>& b, double dy);
double l2_norm(const std::vector<double>& a, double dy);

// zeta*_tau + M zeta* = eps e^{(gamma - 1/2) tau} (zeta*_y - (y/4) zeta*)
struct DriftA1 {
    double epsilon = 0.1;
    double gamma = 0.4;
};
// zeta*_tau + M_eps zeta* = 0
struct DriftA2 {
    double epsilon = 0.1;
};
using Drift = std::variant<DriftA1, DriftA2>;

struct EvolutionOptions {
    double tau_end = 10.0;
    double dtau = 0.01;
    std::size_t record_stride = 10;
    double Y = 40.0;
    double dy = 1e-3;
};

struct EvolutionRecord {
    double tau = 0.0;
    double projection = 0.0;       // <psi, zeta*> (A1) or <psi_eps, zeta*> (A2)
    double orthogonal_norm = 0.0;  // L2 norm of the rest
};

struct Evolution {
    std::vector<double> y;
    std::vector<EvolutionRecord> records;
    std::vector<double> final_profile;  // zeta* at tau_end
    double lambda = 0.0;                 // eigenvalue of the projection basis
};

// zeta0 is zeta* on the interior grid of the options; it must vanish within one unit of both ends
Evolution evolve_selfsimilar(const std::vector<double>& zeta0, const Drift& drift, const EvolutionOptions& opt);

// the same problem in the unsymmetrized variable:
//   zeta_bar_tau = zeta_bar'' + (y/2) zeta_bar' + zeta_bar + drift zeta_bar'
// with drift eps e^{(gamma-1/2) tau} (A1) or eps/2 (A2); returns zeta_bar at tau_end
std::vector<double> evolve_unsymmetrized(const std::vector<double>& zeta_bar0, const Drift& drift, const EvolutionOptions& opt);

// zeta_bar = weight(y) zeta*, with weight e^{-y^2/8} (A1) or e^{-y^2/8 - eps y/4} (A2)
double symmetrizing_weight(const Drift& drift, double y);

void write_eigen_csv(const std::string& path, const EigenResult& eig);
void write_evolution_csv(const std::string& path, const Evolution& ev);

}  // namespace fkpp
