// quality.hpp: Quality factors of a truncated generator

#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "ermea/generators.hpp"

namespace ermea {

struct QualityOptions {
    int dense_crossover = 600;     // full dense spectrum below, shift-invert Arnoldi above
    std::vector<double> partial_thresholds; // chi values E for the restricted trace number
    bool positivity = true;        // nu_m, nu_mt, nu_tc
    bool nu_p = false;
    double nu_p_time = 0.0;        // <= 0: 1 / ||K||_F
    int nu_p_cap = 4096;
    int nu_p_starts = 32;
    unsigned nu_p_seed = 12345;
};

struct QualityReport {
    double nu_c = 0.0;
    double lambda2 = 0.0; // second smallest |lambda|
    double nu_t = 0.0;
    std::vector<std::pair<double, double>> nu_t_partial; // (E, nu_t~)
    double nu_h = 0.0;
    double nu_m = 0.0;
    double nu_mt = 0.0;
    double nu_tc = 0.0;
    std::optional<double> nu_p;
    double nu_p_time = 0.0;
    int N = 0; // |I(E)|
    int n = 0; // active eigenstates
    double threshold = 0.0;
};

struct SmallEigenvalues {
    Eigen::VectorXcd values; // ascending |lambda|
    bool dense = false;
};

// Eigenvalues closest to zero (all of them on the dense path).
SmallEigenvalues smallest_eigenvalues(const Generator& gen, int dense_crossover = 600, int nev = 4);

double convergence_number(const Generator& gen, int dense_crossover = 600);
double trace_number(const Generator& gen);
// Rows and columns restricted to pairs whose states both have chi < E.
double partial_trace_number(const Generator& gen, const std::vector<double>& chi, double E);
double hermiticity_number(const Generator& gen);

struct PositivityMetrics {
    double nu_m = 0.0;
    double nu_mt = 0.0;
    double nu_tc = 0.0;
};
double nu_m(const GammaTensor& gamma);

// Nonzero eigenvalues (larger first) of the rank-2 Hermitian matrix W_ij = w_i + conj(w_j)
// that carries the energy dependence of one lead's CRB Gamma.
std::array<double, 2> w_matrix_eigenvalues(const Eigen::VectorXcd& w);
PositivityMetrics positivity_metrics(const GammaTensor& gamma, const Generator& gen);

// Lower bound of ||exp(K t)||_{1->1} - 1 from alternating maximization over rank-one inputs.
double positivity_number(const Generator& gen, double t, int cap = 4096, int starts = 32, unsigned seed = 12345);

QualityReport quality_report(const Generator& gen, const GammaTensor& gamma, const std::vector<double>& chi,
                             const QualityOptions& opt = {});

struct DissipativityCheck {
    int near_zero = 0;        // eigenvalues with |lambda| <= delta
    double max_real_other = -1e300;
    double min_abs = 0.0;
};
// Full spectrum (dense) check of one near-zero eigenvalue and Re lambda <= 0 for the rest.
DissipativityCheck dissipativity(const Generator& gen, double delta);

} // namespace ermea
