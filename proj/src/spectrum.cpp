// spectrum.cpp: Hamiltonian assembly, sector diagonalization, jump operators

#include "ermea/spectrum.hpp"

#include <algorithm>
#include <bit>
#include <iomanip>
#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>

#include "ermea/errors.hpp"

namespace ermea {

namespace {

double parity_sign(State s, int orbital)
{
    const State below = (State(1) << orbital) - 1;
    return (std::popcount(s & below) % 2) ? -1.0 : 1.0;
}

double diagonal_energy(const SystemSpec& spec, State s)
{
    const int ns = spec.spinful ? 2 : 1;
    Eigen::VectorXd n = Eigen::VectorXd::Zero(spec.sites);
    for (int i = 0; i < spec.sites; ++i)
        for (int sp = 0; sp < ns; ++sp)
            if (s & (State(1) << orbital_index(i, sp, spec.spinful))) n(i) += 1.0;

    double e = n.dot(spec.T.diagonal());
    e += 0.5 * n.dot(spec.U * n);
    if (spec.interaction_shift) {
        // U_ij/2 * (n_is + n_js')/2 summed over both spins and both sites
        e -= 0.5 * ns * n.dot(spec.U.rowwise().sum());
    } else {
        e -= 0.5 * n.dot(spec.U.diagonal());
    }
    return e;
}

} // namespace

std::vector<Eigen::MatrixXd> build_hamiltonian(const SystemSpec& spec, const SectorBasis& basis)
{
    spec.validate();
    const int ns = spec.spinful ? 2 : 1;
    std::vector<Eigen::MatrixXd> blocks;
    blocks.reserve(basis.sectors.size());
    for (std::size_t k = 0; k < basis.sectors.size(); ++k) {
        const auto& states = basis.sectors[k].states;
        const auto d = static_cast<Eigen::Index>(states.size());
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d, d);
        for (Eigen::Index p = 0; p < d; ++p) {
            const State s = states[p];
            H(p, p) = diagonal_energy(spec, s);
            for (int sp = 0; sp < ns; ++sp) {
                for (int j = 0; j < spec.sites; ++j) {
                    const int oj = orbital_index(j, sp, spec.spinful);
                    if (!(s & (State(1) << oj))) continue;
                    const State t = s ^ (State(1) << oj);
                    const double sj = parity_sign(s, oj);
                    for (int i = 0; i < spec.sites; ++i) {
                        if (i == j || spec.T(i, j) == 0.0) continue;
                        const int oi = orbital_index(i, sp, spec.spinful);
                        if (t & (State(1) << oi)) continue;
                        const State u = t | (State(1) << oi);
                        const auto& [uk, up] = basis.lookup.at(u);
                        H(up, p) += spec.T(i, j) * sj * parity_sign(t, oi);
                        (void)uk;
                    }
                }
            }
        }
        blocks.push_back(std::move(H));
    }
    return blocks;
}

Spectrum diagonalize(const SectorBasis& basis, const std::vector<Eigen::MatrixXd>& H)
{
    if (H.size() != basis.sectors.size())
        throw ValidationError("diagonalize: one Hamiltonian block per sector required");
    Spectrum sp;
    int offset = 0;
    for (std::size_t k = 0; k < H.size(); ++k) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H[k]);
        if (es.info() != Eigen::Success)
            throw NumericalError("eigensolver failed in sector N=" + std::to_string(basis.sectors[k].N)
                                 + " Sz=" + std::to_string(basis.sectors[k].Sz));
        sp.energies.push_back(es.eigenvalues());
        sp.vectors.push_back(es.eigenvectors());
        sp.offsets.push_back(offset);
        for (Eigen::Index a = 0; a < es.eigenvalues().size(); ++a) {
            sp.sector_of.push_back(static_cast<int>(k));
            sp.local_of.push_back(static_cast<int>(a));
            sp.N.push_back(basis.sectors[k].N);
            sp.Sz.push_back(basis.sectors[k].Sz);
            sp.E.push_back(es.eigenvalues()(a));
        }
        offset += static_cast<int>(es.eigenvalues().size());
    }
    sp.ground_energy = *std::min_element(sp.E.begin(), sp.E.end());
    return sp;
}

const JumpBlock* JumpOperators::find(int orbital, int to, int from) const
{
    for (const auto& b : annihilation[orbital])
        if (b.to == to && b.from == from) return &b;
    return nullptr;
}

Eigen::MatrixXd JumpOperators::block(int orbital, int s, int to, int from) const
{
    if (s < 0) {
        const JumpBlock* b = find(orbital, to, from);
        return b ? b->m : Eigen::MatrixXd();
    }
    const JumpBlock* b = find(orbital, from, to);
    return b ? Eigen::MatrixXd(b->m.transpose()) : Eigen::MatrixXd();
}

JumpOperators jump_operators(const SectorBasis& basis, const Spectrum& spectrum)
{
    JumpOperators J;
    J.orbitals = basis.orbitals;
    J.annihilation.resize(basis.orbitals);
    for (int mu = 0; mu < basis.orbitals; ++mu) {
        for (const auto& blk : annihilator_matrix(basis, mu)) {
            JumpBlock jb;
            jb.from = blk.from;
            jb.to = blk.to;
            jb.m = spectrum.vectors[blk.to].transpose() * (blk.m * spectrum.vectors[blk.from]);
            jb.m = jb.m.unaryExpr([](double x) { return std::abs(x) < 1e-14 ? 0.0 : x; });
            J.annihilation[mu].push_back(std::move(jb));
        }
    }
    return J;
}

void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum, const std::vector<double>& chi)
{
    os << "global_index,N,Sz,E,chi\n";
    os << std::setprecision(15);
    for (int a = 0; a < spectrum.size(); ++a)
        os << a << ',' << spectrum.N[a] << ',' << spectrum.Sz[a] << ',' << spectrum.E[a] << ','
           << (a < static_cast<int>(chi.size()) ? chi[a] : spectrum.E[a]) << '\n';
}

} // namespace ermea
