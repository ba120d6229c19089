// ermea.hpp: Energy-resolved truncation loop and steady-state extraction

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ermea/errors.hpp"
#include "ermea/generators.hpp"
#include "ermea/quality.hpp"

namespace ermea {

struct ErmeaConfig {
    Variant variant = Variant::CRB;
    double delta = 1e-6;              // stop when nu_c <= delta
    std::optional<double> delta_E;    // partial-secular gap [eV]; none keeps whole sectors
    double E2_offset = 80.0;          // intermediate-state cut above the ground chi [eV]
    int growth = 1;                   // chi levels added per step
    int max_dimension = 400000;       // cap on |I(E)|
    bool lamb_shift = true;
    QualityOptions quality;

    void validate() const;
};

struct TraceRow {
    double threshold = 0.0;
    int levels = 0;
    int N = 0;
    int n = 0;
    double nu_c = 0.0;
    double lambda2 = 0.0; // second smallest |lambda|
    double nu_t = 0.0;
    double nu_m = 0.0;
};

struct SteadyState {
    BuiltGenerator built;         // generator on the final index set
    Eigen::VectorXcd sigma;       // entries over built.index->pairs, unit trace
    QualityReport report;
    std::vector<TraceRow> trace;  // one row per step (ERMEA runs)
    bool converged = true;
    double solver_disagreement = 0.0; // bordered solve vs Arnoldi kernel vector
    double hermiticity_defect = 0.0;  // ||sigma - sigma^H|| before symmetrization
    std::vector<std::string> warnings;

    const IndexSet& index() const { return *built.index; }
    Eigen::MatrixXcd block(int B) const;         // sigma restricted to one index-set block
    Eigen::MatrixXcd dense(int n_states) const;  // zero-padded full matrix
};

struct NonConvergenceError : NumericalError {
    NonConvergenceError(const std::string& what, std::shared_ptr<SteadyState> best)
        : NumericalError(what), best(std::move(best)) {}
    std::shared_ptr<SteadyState> best;
};

// Kernel vector of an assembled generator: bordered LU solve, checked against Arnoldi.
SteadyState solve_steady_state(const Model& model, BuiltGenerator built, const QualityOptions& quality,
                               bool with_report = true);

// Steady state on a fixed index set without truncation loop.
SteadyState steady_state_on(const Model& model, Variant v, IndexSet index, const QualityOptions& quality = {},
                            bool lamb = true, bool with_report = true);

// The truncation loop over chi levels.
SteadyState run_ermea(const Model& model, const ErmeaConfig& config);

// ||K_full embed(sigma)|| / ||K_full||_F with sigma zero-padded to the larger index set.
double embedding_check(const SteadyState& ss, const Generator& full);

// Gamma blocks and traces of `gamma` (built on a superset with the same ordering) cut to `small`.
GammaTensor restrict_gamma(const GammaTensor& gamma, const IndexSet& big, const IndexSet& small);

} // namespace ermea
