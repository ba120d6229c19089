// spectrum.hpp: Sector Hamiltonians, eigenpairs and eigenbasis jump operators

#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "ermea/fockspace.hpp"

namespace ermea {

// Per-sector dense Hamiltonian blocks, ordered like basis.sectors.
std::vector<Eigen::MatrixXd> build_hamiltonian(const SystemSpec& spec, const SectorBasis& basis);

struct Spectrum {
    std::vector<Eigen::VectorXd> energies; // ascending per sector
    std::vector<Eigen::MatrixXd> vectors;  // columns are eigenvectors
    std::vector<int> offsets;              // global index of the first eigenstate per sector
    std::vector<int> sector_of;            // per global eigenstate
    std::vector<int> local_of;
    std::vector<int> N;
    std::vector<int> Sz;
    std::vector<double> E;
    double ground_energy = 0.0;

    int size() const { return static_cast<int>(E.size()); }
    int sectors() const { return static_cast<int>(energies.size()); }
    int sector_size(int k) const { return static_cast<int>(energies[k].size()); }
};

Spectrum diagonalize(const SectorBasis& basis, const std::vector<Eigen::MatrixXd>& H);

// <a|c_mu|b> with a in sector `to`, b in sector `from`; the creation block is its transpose.
struct JumpBlock {
    int from = 0;
    int to = 0;
    Eigen::MatrixXd m;
};

struct JumpOperators {
    int orbitals = 0;
    std::vector<std::vector<JumpBlock>> annihilation; // per orbital

    // <to|c_mu^s|from>; empty when the sector pair is not connected
    Eigen::MatrixXd block(int orbital, int s, int to, int from) const;
    const JumpBlock* find(int orbital, int to, int from) const;
};

JumpOperators jump_operators(const SectorBasis& basis, const Spectrum& spectrum);

// columns: global_index, N, Sz, E, chi
void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum, const std::vector<double>& chi);

} // namespace ermea
