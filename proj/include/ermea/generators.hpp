// generators.hpp: Index sets, Gamma tensors, Lamb shift and sparse generator assembly

#pragma once

#include <array>
#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ermea/bath.hpp"
#include "ermea/fockspace.hpp"
#include "ermea/spectrum.hpp"

namespace ermea {

using cplx = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cplx>;

enum class Variant { CRB, PERLind, DL };
std::string to_string(Variant v);
Variant parse_variant(const std::string& name);

inline constexpr double kDegeneracyTol = 1e-9; // eV

// ---- cost function and ordering ----------------------------------------------------------

double mu_bar(const std::vector<LeadSpec>& leads);
std::vector<double> cost_function(const Spectrum& spectrum, double mu_bar);

struct ChiOrder {
    std::vector<int> order;       // eigenstates by ascending chi; ties by sector, then local index
    std::vector<int> rank;        // inverse permutation
    std::vector<int> level_start; // offsets into `order`, one per distinct chi level, plus end sentinel
    std::vector<double> level_chi;
    int levels() const { return static_cast<int>(level_chi.size()); }
};
ChiOrder chi_order(const Spectrum& spectrum, const std::vector<double>& chi, double tie_tol = kDegeneracyTol);

// Cluster id per eigenstate. Within a sector, sorted levels are chained while consecutive
// gaps are <= dE. No dE: one cluster per sector. dE = 0: exact degeneracies only.
std::vector<int> secular_clusters(const Spectrum& spectrum, std::optional<double> delta_E);

// ---- coupled model -----------------------------------------------------------------------

struct ChannelBlock {
    int from = 0; // sector of the ket
    int to = 0;   // sector with one particle fewer
    Eigen::MatrixXd m; // <to| sum_mu V_mu c_mu |from>
};

struct ChannelOperators {
    int lead = 0;
    std::vector<ChannelBlock> blocks;
    std::vector<int> by_from; // sector -> block index or -1
    std::vector<int> by_to;

    // <row| B |col> if row has one particle fewer, <row| B^dagger |col> if one more; else empty
    Eigen::MatrixXd matrix(int row_sector, int col_sector) const;
};

struct Model {
    SystemSpec spec;
    SectorBasis basis;
    Spectrum spectrum;
    JumpOperators jumps;
    std::shared_ptr<const BathKernel> kernel;
    std::vector<ChannelOperators> channels;
    double mu_bar = 0.0;
    std::vector<double> chi;
    ChiOrder order;

    int leads() const { return static_cast<int>(kernel->leads().size()); }
    double chi_min() const { return chi[order.order.front()]; }
};

Model build_model(const SystemSpec& spec, const std::vector<LeadSpec>& leads, QuadratureConfig quad = {});
// Same system (basis, spectrum, jump operators reused) with new leads.
Model recouple(const Model& base, const std::vector<LeadSpec>& leads, QuadratureConfig quad = {});

// ---- index set ---------------------------------------------------------------------------

struct IndexSet {
    std::vector<std::pair<int, int>> pairs; // (a, b) global eigenstate indices
    std::optional<double> delta_E;
    std::optional<double> threshold;  // states with chi < threshold
    double intermediate_cut = 0.0;    // chi bound for intermediate sums (max(E2, threshold))
    double mu_bar = 0.0;
    int active_states = 0;            // n(E)

    std::vector<int> block_of; // per eigenstate, -1 when inactive
    std::vector<int> slot_of;  // position inside its block
    std::vector<std::vector<int>> blocks;
    std::vector<int> block_sector;
    std::vector<Eigen::MatrixXi> block_pos;       // position of (blocks[b][i], blocks[b][j])
    std::vector<std::vector<int>> sector_blocks;  // active blocks per sector
    std::vector<int> diagonal;                    // positions of (a, a)

    int size() const { return static_cast<int>(pairs.size()); }
    int find(int a, int b) const;
    bool secular() const { return delta_E && *delta_E == 0.0; }
};

// Spec-level entry point: chi = E - mu_bar N; E2 defaults to the ground chi + 80 eV.
IndexSet build_index_set(const Spectrum& spectrum, std::optional<double> delta_E, std::optional<double> threshold,
                         double mu_bar, std::optional<double> E2_offset = std::nullopt);

// Index set with the first `levels` distinct chi levels of `order` active.
IndexSet build_index_set_levels(const Spectrum& spectrum, const ChiOrder& order,
                                std::optional<double> delta_E, int levels, double E2_absolute, double mu_bar);

std::size_t count_pairs(const Spectrum& spectrum, std::optional<double> delta_E);

// ---- Gamma tensor and Lamb shift -----------------------------------------------------------

// Jump-pair block: rows/cols (a in P, b in Q) flattened as ia * |Q| + ib.
struct GammaBlock {
    int lead = 0;
    int s = 0;
    int P = 0;
    int Q = 0;
    Eigen::MatrixXd g;
};

struct GammaTensor {
    Variant variant = Variant::CRB;
    int leads = 0;
    std::vector<GammaBlock> blocks;
    // trace13[lead][s > 0][block]: sum_a Gamma^{lead,s}_{ab|ad} over intermediate a, as (d, b)
    std::vector<std::array<std::vector<Eigen::MatrixXd>, 2>> trace13;

    Eigen::MatrixXd total_trace13(int block) const;
};

GammaTensor gamma_crb(const Model& model, const IndexSet& index);
GammaTensor gamma_perlind(const Model& model, const IndexSet& index);
GammaTensor gamma_dl(const Model& model, const IndexSet& index);
GammaTensor build_gamma(Variant v, const Model& model, const IndexSet& index);

// Gamma^{lead}_{ab|cd} computed directly from the jump operators (reference path for tests).
double gamma_entry(Variant v, const Model& model, int lead, int a, int b, int c, int d);

struct LambShift {
    std::vector<Eigen::MatrixXd> sectors; // per sector, eigenbasis
};

// Entries limited to pairs sharing a block of `restrict_to` when given (the generator never
// reads others); otherwise whole sectors. Intermediate states have chi < cut.
LambShift lamb_shift(const Model& model, double intermediate_cut, const IndexSet* restrict_to = nullptr);

// ---- generator ---------------------------------------------------------------------------

struct Generator {
    SpMat K;
    Variant variant = Variant::CRB;
    const IndexSet* index = nullptr; // non-owning
    int size() const { return static_cast<int>(K.rows()); }
};

Generator assemble_generator(const Model& model, const LambShift& lamb, const GammaTensor& gamma,
                             const IndexSet& index);

// Convenience: Gamma + Lamb shift + assembly. `with_lamb` = false drops H_LS.
struct BuiltGenerator {
    std::shared_ptr<IndexSet> index;
    GammaTensor gamma;
    LambShift lamb;
    Generator gen;
};
BuiltGenerator build_generator(Variant v, const Model& model, IndexSet index, bool with_lamb = true);

// Column-wise vectorization over the full eigenbasis: (a, b) -> a + n b.
inline long vec_index(int a, int b, int n) { return long(a) + long(n) * b; }

// C(M)_{(a,b),(c,d)} = M_{(a,c),(b,d)} on full n^2 x n^2 matrices.
Eigen::MatrixXcd choi_transform(const Eigen::MatrixXcd& M, int n);
// Generator on an index set -> Choi matrix over the full n^2 compound space.
SpMat choi_transform(const Generator& gen, int n_states);

// Dense n^2 x n^2 generator over the full space (zero outside the index set), column-wise.
Eigen::MatrixXcd dense_superoperator(const Generator& gen, int n_states);

// "row,col,re,im" CSV plus a manifest of the index set.
void dump_generator(const Generator& gen, const std::string& matrix_path, const std::string& manifest_path);

} // namespace ermea
