// observables.hpp: Currents, purity, coherence and occupations of a steady state

#pragma once

#include <utility>
#include <vector>

#include "ermea/ermea.hpp"

namespace ermea {

// e * (1 eV / hbar) in ampere (exact SI e, CODATA hbar in eV s)
inline constexpr double kElementaryCharge = 1.602176634e-19;
inline constexpr double kHbarEvSeconds = 6.582119569e-16;
inline constexpr double kCurrentUnitAmpere = kElementaryCharge / kHbarEvSeconds;
inline constexpr double kCurrentUnitMicroAmpere = kCurrentUnitAmpere * 1e6;

struct ObservableSet {
    std::vector<double> current;    // per lead [e eV / hbar], positive into the system
    std::vector<double> current_uA; // same in microampere
    double purity = 0.0;
    double coherence_norm = 0.0;
    double N_mean = 0.0;
    double min_eigenvalue = 0.0;
    std::vector<std::pair<int, double>> occupation; // (eigenstate, weight)
};

// Particle current out of lead `lead` into the system, from the lead's Tr13 Gamma blocks.
double current(const GammaTensor& gamma, int lead, const IndexSet& index, const Eigen::VectorXcd& sigma);

double purity(const SteadyState& ss);
double coherence_norm(const SteadyState& ss);
double mean_particle_number(const SteadyState& ss, const Spectrum& spectrum);
double min_eigenvalue(const SteadyState& ss);
std::vector<std::pair<int, double>> occupation(const SteadyState& ss);

ObservableSet observables(const SteadyState& ss, const Model& model);

} // namespace ermea
