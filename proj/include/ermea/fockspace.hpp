// fockspace.hpp: Occupation-number basis split into (N, Sz) sectors

#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace ermea {

using State = std::uint32_t;

struct SystemSpec {
    int sites = 0;
    bool spinful = false;
    Eigen::MatrixXd T; // hopping [eV]
    Eigen::MatrixXd U; // interaction [eV]
    // true: U_ij/2 (n n - (n + n)/2); false: plain U_ij/2 n n
    bool interaction_shift = true;

    int orbitals() const { return spinful ? 2 * sites : sites; }
    void validate() const;
};

// site-major, spin-minor: (site, up), (site, down), (site+1, up), ...
inline int orbital_index(int site, int spin, bool spinful)
{
    return spinful ? 2 * site + spin : site;
}

struct Sector {
    int N = 0;
    int Sz = 0; // n_up - n_down, 0 when spinless
    std::vector<State> states;
};

struct SectorBasis {
    int orbitals = 0;
    bool spinful = false;
    std::vector<Sector> sectors;
    std::unordered_map<State, std::pair<int, int>> lookup; // state -> (sector, position)
    std::vector<int> offsets;                               // first global index of each sector

    std::size_t dimension() const;
    int find_sector(int N, int Sz) const; // -1 when absent
    int global_index(State s) const;
};

int particle_number(State s);
int twice_sz(State s, bool spinful);

// default budget: 2^24 states
SectorBasis build_basis(const SystemSpec& spec, std::size_t max_states = std::size_t(1) << 24);

// One nonzero block of a particle-number-changing operator: rows in `to`, columns in `from`.
struct OperatorBlock {
    int from = 0;
    int to = 0;
    Eigen::SparseMatrix<double> m;
};
using SectorOperator = std::vector<OperatorBlock>;

SectorOperator annihilator_matrix(const SectorBasis& basis, int orbital);
SectorOperator creator_matrix(const SectorBasis& basis, int orbital);

// Dense-index sparse form over the whole Fock space (global ordering by sector offsets).
Eigen::SparseMatrix<double> to_full_matrix(const SectorBasis& basis, const SectorOperator& op);

} // namespace ermea
