// bath.hpp: Tight-binding lead kernels: surface Green function, occupations, gamma and sigma

#pragma once

#include <complex>
#include <cstdint>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "ermea/fockspace.hpp"

namespace ermea {

struct LeadSpec {
    std::string id;
    double t_B = 6.0;   // chain hopping [eV]
    double eps_B = 0.0; // on-site energy [eV]
    double beta = 20.0; // [1/eV]
    double mu = 0.0;    // [eV]
    Eigen::VectorXd coupling; // V_{alpha,i} over system sites [eV]

    void validate(int sites) const;
    double weight() const { return coupling.cwiseAbs().sum(); }
};

std::complex<double> surface_green(const LeadSpec& lead, double w);
double spectral_density(const LeadSpec& lead, double w); // i(G^R - G^A) = -2 Im G^R

// f^+(x) = 1/(exp(beta(x-mu)) + 1), f^- = 1 - f^+, safe for any |beta(x-mu)|
double fermi(int s, double x, double beta, double mu);

// O^s(w) = i(G^R - G^A)(s w) f^{-s}(s w)
double occupation(const LeadSpec& lead, int s, double w);

// S^s(w) = P int A(x) f^{-s}(x) / (w - s x) dx over the band
double principal_value(const LeadSpec& lead, int s, double w, double abs_tol = 1e-10, double* error = nullptr);

// One lead-spin channel: the lead index and its coupling over system orbitals.
struct Channel {
    int lead = 0;
    int spin = 0;
    Eigen::VectorXd coupling;
};

struct QuadratureConfig {
    double abs_tol = 1e-10;
    double cache_resolution = 1e-12; // eV
};

class BathKernel {
public:
    BathKernel(std::vector<LeadSpec> leads, int sites, bool spinful, QuadratureConfig quad = {});

    const std::vector<LeadSpec>& leads() const { return leads_; }
    const std::vector<Channel>& channels() const { return channels_; }
    int orbitals() const { return orbitals_; }
    const QuadratureConfig& quadrature() const { return quad_; }

    double occupation(int lead, int s, double w) const;
    double principal_value(int lead, int s, double w) const; // memoized

    // matrices over system orbitals (mu, kappa)
    Eigen::MatrixXcd gamma(int s, double w) const;
    Eigen::MatrixXcd sigma(int s, double w) const;
    std::complex<double> gamma_hermitian(int s, int mu, int kappa, double w) const;
    std::complex<double> sigma_antihermitian(int s, int mu, int kappa, double w) const;

    std::size_t cache_size() const;

private:
    std::vector<LeadSpec> leads_;
    std::vector<Channel> channels_;
    int orbitals_ = 0;
    QuadratureConfig quad_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::uint64_t, double> cache_;
};

} // namespace ermea
