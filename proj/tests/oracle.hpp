// oracle.hpp: Dense master equation built from full Fock-space operators

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "ermea/bath.hpp"
#include "ermea/fockspace.hpp"
#include "ermea/generators.hpp"
#include "ermea/spectrum.hpp"

namespace test {

// Everything in the eigenbasis, as dense n x n matrices.
struct DenseSystem {
    int n = 0;
    Eigen::VectorXd E;
    Eigen::VectorXi N, Sz;
    std::vector<int> lead_of;          // per channel
    std::vector<Eigen::MatrixXd> B;    // per channel: <a| sum_mu V_mu c_mu |b>
    std::vector<ermea::LeadSpec> leads;
};

inline DenseSystem dense_system(const ermea::SystemSpec& spec, const std::vector<ermea::LeadSpec>& leads)
{
    DenseSystem d;
    const auto basis = ermea::build_basis(spec);
    const auto sp = ermea::diagonalize(basis, ermea::build_hamiltonian(spec, basis));
    d.n = sp.size();
    d.E.resize(d.n);
    d.N.resize(d.n);
    d.Sz.resize(d.n);
    for (int a = 0; a < d.n; ++a) {
        d.E(a) = sp.E[a];
        d.N(a) = sp.N[a];
        d.Sz(a) = sp.Sz[a];
    }
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(d.n, d.n);
    for (int k = 0; k < sp.sectors(); ++k)
        U.block(basis.offsets[k], sp.offsets[k], sp.sector_size(k), sp.sector_size(k)) = sp.vectors[k];
    std::vector<Eigen::MatrixXd> c(basis.orbitals);
    for (int m = 0; m < basis.orbitals; ++m)
        c[m] = U.transpose() * Eigen::MatrixXd(ermea::to_full_matrix(basis, ermea::annihilator_matrix(basis, m))) * U;
    d.leads = leads;
    for (std::size_t l = 0; l < leads.size(); ++l)
        for (int spin = 0; spin < (spec.spinful ? 2 : 1); ++spin) {
            Eigen::MatrixXd B = Eigen::MatrixXd::Zero(d.n, d.n);
            for (int i = 0; i < spec.sites; ++i) B += leads[l].coupling(i) * c[ermea::orbital_index(i, spin, spec.spinful)];
            d.B.push_back(B);
            d.lead_of.push_back(static_cast<int>(l));
        }
    return d;
}

// <a|B^{-s}|b> for s = N_b - N_a
inline double lowered(const Eigen::MatrixXd& B, int s, int a, int b) { return s > 0 ? B(a, b) : B(b, a); }

// Gamma^{lead}_{ab|cd} straight from the defining formula; lead < 0 sums all leads
inline double gamma(const DenseSystem& d, ermea::Variant v, int lead, int a, int b, int c, int e)
{
    const int s = d.N(b) - d.N(a);
    if (std::abs(s) != 1 || d.N(e) - d.N(c) != s) return 0.0;
    if (v == ermea::Variant::DL && std::abs((d.E(b) - d.E(a)) - (d.E(e) - d.E(c))) > 1e-9) return 0.0;
    double total = 0.0;
    for (std::size_t ch = 0; ch < d.B.size(); ++ch) {
        const int l = d.lead_of[ch];
        if (lead >= 0 && l != lead) continue;
        const double o1 = ermea::occupation(d.leads[l], s, d.E(b) - d.E(a));
        const double o2 = ermea::occupation(d.leads[l], s, d.E(e) - d.E(c));
        double w = 0.0;
        switch (v) {
        case ermea::Variant::CRB: w = 0.5 * (o1 + o2); break;
        case ermea::Variant::PERLind: w = std::sqrt(o1 * o2); break;
        case ermea::Variant::DL: w = o1; break;
        }
        total += lowered(d.B[ch], s, a, b) * w * lowered(d.B[ch], s, c, e);
    }
    return total;
}

// H_LS = 1/(4 pi) sum_{s, channel} sum_e <a|B^s|e><c|B^s|e> [S^s(E_a - E_e) + S^s(E_c - E_e)]
inline Eigen::MatrixXd lamb_shift(const DenseSystem& d)
{
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d.n, d.n);
    for (std::size_t ch = 0; ch < d.B.size(); ++ch) {
        const auto& lead = d.leads[d.lead_of[ch]];
        for (int s : {+1, -1}) {
            // D(a, e) = <a|B^s|e>
            const Eigen::MatrixXd D = s > 0 ? Eigen::MatrixXd(d.B[ch].transpose()) : d.B[ch];
            Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d.n, d.n);
            for (int a = 0; a < d.n; ++a)
                for (int e = 0; e < d.n; ++e)
                    if (D(a, e) != 0.0) S(a, e) = ermea::principal_value(lead, s, d.E(a) - d.E(e), 1e-12);
            const Eigen::MatrixXd DS = D.cwiseProduct(S);
            H += (DS * D.transpose() + D * DS.transpose()) / (4.0 * std::numbers::pi);
        }
    }
    return H;
}

// Column-wise n^2 x n^2 Lindblad-form generator
//   d sigma = -i[H, sigma] + sum_ij Gamma_ij (A_i sigma A_j^dag - 1/2 {A_j^dag A_i, sigma}),  A_i = |a><b|
inline Eigen::MatrixXcd superoperator(const DenseSystem& d, ermea::Variant v, const Eigen::MatrixXd& H_LS,
                                      int lead = -1, bool with_commutator = true)
{
    const int n = d.n;
    const std::complex<double> iu(0.0, 1.0);
    auto idx = [n](int a, int b) { return long(a) + long(n) * b; };
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(long(n) * n, long(n) * n);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n); // M_db = sum_a Gamma_{ab|ad}
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (std::abs(d.N(a) - d.N(b)) != 1) continue;
            for (int c = 0; c < n; ++c)
                for (int e = 0; e < n; ++e) {
                    const double g = gamma(d, v, lead, a, b, c, e);
                    if (g == 0.0) continue;
                    K(idx(a, c), idx(b, e)) += g;
                    if (a == c) M(e, b) += g;
                }
        }
    Eigen::MatrixXd H = with_commutator ? Eigen::MatrixXd(H_LS) : Eigen::MatrixXd::Zero(n, n);
    if (with_commutator) H.diagonal() += d.E;
    const Eigen::MatrixXcd A = -iu * H.cast<std::complex<double>>() - 0.5 * M.cast<std::complex<double>>();
    for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c)
            for (int e = 0; e < n; ++e) {
                K(idx(a, c), idx(e, c)) += A(a, e);
                K(idx(a, c), idx(a, e)) += std::conj(A(c, e));
            }
    return K;
}

} // namespace test
