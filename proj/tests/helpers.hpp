// helpers.hpp: Shared model fixtures for the test binaries

#pragma once

#include <random>

#include <Eigen/Dense>

#include "ermea/bath.hpp"
#include "ermea/fockspace.hpp"

namespace test {

// open chain, unit hopping, no interaction
inline ermea::SystemSpec chain(int l, bool spinful)
{
    ermea::SystemSpec s;
    s.sites = l;
    s.spinful = spinful;
    s.T = Eigen::MatrixXd::Zero(l, l);
    for (int i = 0; i + 1 < l; ++i) s.T(i, i + 1) = s.T(i + 1, i) = -1.0;
    s.U = Eigen::MatrixXd::Zero(l, l);
    return s;
}

// non-interacting three-site model of the NEGF comparison
inline ermea::SystemSpec three_site(double interaction = 0.0)
{
    ermea::SystemSpec s;
    s.sites = 3;
    s.spinful = false;
    s.interaction_shift = false;
    s.T.resize(3, 3);
    s.T << 1.0, -0.1, 0.0, -0.1, 1.0, -0.1, 0.0, -0.1, 6.0;
    s.U = Eigen::MatrixXd::Zero(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) s.U(i, j) = interaction;
    return s;
}

inline ermea::SystemSpec benzene(bool spinful)
{
    ermea::SystemSpec s;
    s.sites = 6;
    s.spinful = spinful;
    s.T.resize(6, 6);
    s.T << -3.8, -2.0, -0.3, 0.0, -0.3, -2.0,
           -2.0, -3.8, -2.0, -0.3, 0.0, -0.3,
           -0.3, -2.0, -3.8, -2.0, -0.3, 0.0,
           0.0, -0.3, -2.0, -3.8, -2.0, -0.3,
           -0.3, 0.0, -0.3, -2.0, -3.8, -2.0,
           -2.0, -0.3, 0.0, -0.3, -2.0, -3.8;
    s.U.resize(6, 6);
    s.U << 8, 5, 3, 2, 3, 5,
           5, 8, 5, 3, 2, 3,
           3, 5, 8, 5, 3, 2,
           2, 3, 5, 8, 5, 3,
           3, 2, 3, 5, 8, 5,
           5, 3, 2, 3, 5, 8.1;
    return s;
}

inline ermea::LeadSpec lead(const std::string& id, int sites, int site, double V, double mu, double beta = 20.0)
{
    ermea::LeadSpec l;
    l.id = id;
    l.mu = mu;
    l.beta = beta;
    l.coupling = Eigen::VectorXd::Zero(sites);
    l.coupling(site) = V;
    return l;
}

// left lead on `left`, right lead on `right`, mu = -/+ V_B / 2
inline std::vector<ermea::LeadSpec> two_leads(int sites, int left, int right, double V, double V_B,
                                              double beta = 20.0)
{
    return {lead("L", sites, left, V, -0.5 * V_B, beta), lead("R", sites, right, V, 0.5 * V_B, beta)};
}

// random interacting spinless model with all-to-all hopping
inline ermea::SystemSpec random_model(int l, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ermea::SystemSpec s;
    s.sites = l;
    s.spinful = false;
    s.T.resize(l, l);
    s.U.resize(l, l);
    for (int i = 0; i < l; ++i)
        for (int j = 0; j <= i; ++j) {
            s.T(i, j) = s.T(j, i) = u(rng);
            s.U(i, j) = s.U(j, i) = 1.0 + 0.5 * u(rng);
        }
    return s;
}

} // namespace test
