// fockspace.cpp: Sector basis construction and fermionic ladder operators

#include "ermea/fockspace.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <string>

#include "ermea/errors.hpp"

namespace ermea {

namespace {

bool symmetric(const Eigen::MatrixXd& m)
{
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

} // namespace

void SystemSpec::validate() const
{
    if (sites < 1) throw ValidationError("system: sites must be >= 1");
    if (T.rows() != sites || T.cols() != sites)
        throw ValidationError("system: T must be " + std::to_string(sites) + "x" + std::to_string(sites));
    if (U.rows() != sites || U.cols() != sites)
        throw ValidationError("system: U must be " + std::to_string(sites) + "x" + std::to_string(sites));
    if (!symmetric(T)) throw ValidationError("system: T is not symmetric");
    if (!symmetric(U)) throw ValidationError("system: U is not symmetric");
}

int particle_number(State s)
{
    return std::popcount(s);
}

int twice_sz(State s, bool spinful)
{
    if (!spinful) return 0;
    constexpr State up_mask = 0x55555555u; // even orbitals are spin up
    return std::popcount(s & up_mask) - std::popcount(s & ~up_mask);
}

std::size_t SectorBasis::dimension() const
{
    return lookup.size();
}

int SectorBasis::find_sector(int N, int Sz) const
{
    for (std::size_t k = 0; k < sectors.size(); ++k)
        if (sectors[k].N == N && sectors[k].Sz == Sz) return static_cast<int>(k);
    return -1;
}

int SectorBasis::global_index(State s) const
{
    auto it = lookup.find(s);
    if (it == lookup.end()) return -1;
    return offsets[it->second.first] + it->second.second;
}

SectorBasis build_basis(const SystemSpec& spec, std::size_t max_states)
{
    spec.validate();
    const int no = spec.orbitals();
    if (no > 31 || (std::size_t(1) << no) > max_states)
        throw CapacityError("fock space of " + std::to_string(no) + " orbitals exceeds the state budget of "
                            + std::to_string(max_states));

    std::map<std::pair<int, int>, std::vector<State>> grouped;
    const State count = State(1) << no;
    for (State s = 0; s < count; ++s)
        grouped[{particle_number(s), twice_sz(s, spec.spinful)}].push_back(s);

    SectorBasis basis;
    basis.orbitals = no;
    basis.spinful = spec.spinful;
    int offset = 0;
    for (auto& [key, states] : grouped) {
        Sector sec;
        sec.N = key.first;
        sec.Sz = key.second;
        sec.states = std::move(states);
        const int k = static_cast<int>(basis.sectors.size());
        for (std::size_t p = 0; p < sec.states.size(); ++p)
            basis.lookup.emplace(sec.states[p], std::make_pair(k, static_cast<int>(p)));
        basis.offsets.push_back(offset);
        offset += static_cast<int>(sec.states.size());
        basis.sectors.push_back(std::move(sec));
    }
    return basis;
}

SectorOperator annihilator_matrix(const SectorBasis& basis, int orbital)
{
    if (orbital < 0 || orbital >= basis.orbitals)
        throw ValidationError("orbital index out of range");
    const State bit = State(1) << orbital;
    const State below = bit - 1;

    std::map<std::pair<int, int>, std::vector<Eigen::Triplet<double>>> entries;
    for (std::size_t k = 0; k < basis.sectors.size(); ++k) {
        const Sector& sec = basis.sectors[k];
        for (std::size_t p = 0; p < sec.states.size(); ++p) {
            const State s = sec.states[p];
            if (!(s & bit)) continue;
            const State t = s ^ bit;
            const auto& [tk, tp] = basis.lookup.at(t);
            const double sign = (std::popcount(s & below) % 2) ? -1.0 : 1.0;
            entries[{static_cast<int>(k), tk}].emplace_back(tp, static_cast<int>(p), sign);
        }
    }

    SectorOperator op;
    for (auto& [key, trips] : entries) {
        OperatorBlock blk;
        blk.from = key.first;
        blk.to = key.second;
        blk.m.resize(static_cast<Eigen::Index>(basis.sectors[blk.to].states.size()),
                     static_cast<Eigen::Index>(basis.sectors[blk.from].states.size()));
        blk.m.setFromTriplets(trips.begin(), trips.end());
        op.push_back(std::move(blk));
    }
    return op;
}

SectorOperator creator_matrix(const SectorBasis& basis, int orbital)
{
    SectorOperator op = annihilator_matrix(basis, orbital);
    for (auto& blk : op) {
        std::swap(blk.from, blk.to);
        blk.m = Eigen::SparseMatrix<double>(blk.m.transpose());
    }
    return op;
}

Eigen::SparseMatrix<double> to_full_matrix(const SectorBasis& basis, const SectorOperator& op)
{
    const auto n = static_cast<Eigen::Index>(basis.dimension());
    std::vector<Eigen::Triplet<double>> trips;
    for (const auto& blk : op) {
        const int r0 = basis.offsets[blk.to];
        const int c0 = basis.offsets[blk.from];
        for (int c = 0; c < blk.m.outerSize(); ++c)
            for (Eigen::SparseMatrix<double>::InnerIterator it(blk.m, c); it; ++it)
                trips.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
    }
    Eigen::SparseMatrix<double> full(n, n);
    full.setFromTriplets(trips.begin(), trips.end());
    return full;
}

} // namespace ermea
