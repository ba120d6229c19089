// negf.hpp: Exact non-interacting steady-state current (Green function oracle)

#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ermea/bath.hpp"
#include "ermea/fockspace.hpp"

namespace ermea {

// Delta(w) = sum_alpha V_alpha g_alpha(w) V_alpha^T over sites
Eigen::MatrixXcd hybridization(const LeadSpec& lead, double w);
Eigen::MatrixXcd hybridization(const std::vector<LeadSpec>& leads, double w);

// Broadening i (Delta - Delta^H), positive semidefinite.
Eigen::MatrixXcd broadening(const LeadSpec& lead, double w);

Eigen::MatrixXcd retarded_green(const SystemSpec& spec, const std::vector<LeadSpec>& leads, double w);

// Tr[Gamma_L G Gamma_R G^H] for leads[0] = L, leads[1] = R
double transmission(const SystemSpec& spec, const std::vector<LeadSpec>& leads, double w);

struct NegfResult {
    double current = 0.0;         // from lead 0 into the system [e eV / hbar], Landauer form
    double current_keldysh = 0.0; // same from the lesser Green function
    double N = 0.0;               // mean particle number
    double error = 0.0;           // quadrature error estimate on the current
    std::vector<std::pair<double, double>> transmission; // (w, T) samples on request
};

// Two leads, U = 0 only. Spinful systems count both spin species.
NegfResult negf_current(const SystemSpec& spec, const std::vector<LeadSpec>& leads, double abs_tol = 1e-12,
                        int transmission_samples = 0);

} // namespace ermea
