// observables.cpp: Steady-state observables

#include "ermea/observables.hpp"

#include <cmath>

namespace ermea {

double current(const GammaTensor& gamma, int lead, const IndexSet& I, const Eigen::VectorXcd& sigma)
{
    if (lead < 0 || lead >= static_cast<int>(gamma.trace13.size()))
        throw ValidationError("current: lead index out of range");
    if (sigma.size() != I.size() || gamma.trace13[lead][0].size() != I.blocks.size())
        throw ValidationError("current: Gamma tensor and sigma live on different index sets");
    // dN/dt contribution of the lead: creation (s = +1) adds a particle, annihilation removes one
    double I_alpha = 0.0;
    for (std::size_t B = 0; B < I.blocks.size(); ++B) {
        const Eigen::MatrixXd D = gamma.trace13[lead][1][B] - gamma.trace13[lead][0][B];
        const auto& pos = I.block_pos[B];
        for (Eigen::Index d = 0; d < D.rows(); ++d)
            for (Eigen::Index b = 0; b < D.cols(); ++b)
                if (D(d, b) != 0.0) I_alpha += (D(d, b) * sigma(pos(b, d))).real();
    }
    return -I_alpha;
}

double purity(const SteadyState& ss)
{
    return ss.sigma.squaredNorm();
}

double coherence_norm(const SteadyState& ss)
{
    double c = 0.0;
    const auto& I = ss.index();
    for (int p = 0; p < I.size(); ++p)
        if (I.pairs[p].first != I.pairs[p].second) c += std::abs(ss.sigma(p));
    return c;
}

double mean_particle_number(const SteadyState& ss, const Spectrum& spectrum)
{
    double n = 0.0;
    const auto& I = ss.index();
    for (int p : I.diagonal) n += ss.sigma(p).real() * spectrum.N[I.pairs[p].first];
    return n;
}

double min_eigenvalue(const SteadyState& ss)
{
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t B = 0; B < ss.index().blocks.size(); ++B) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ss.block(static_cast<int>(B)), Eigen::EigenvaluesOnly);
        m = std::min(m, es.eigenvalues().minCoeff());
    }
    return m;
}

std::vector<std::pair<int, double>> occupation(const SteadyState& ss)
{
    std::vector<std::pair<int, double>> occ;
    const auto& I = ss.index();
    for (int p : I.diagonal) occ.emplace_back(I.pairs[p].first, ss.sigma(p).real());
    return occ;
}

ObservableSet observables(const SteadyState& ss, const Model& model)
{
    ObservableSet o;
    for (int l = 0; l < model.leads(); ++l) {
        o.current.push_back(current(ss.built.gamma, l, ss.index(), ss.sigma));
        o.current_uA.push_back(o.current.back() * kCurrentUnitMicroAmpere);
    }
    o.purity = purity(ss);
    o.coherence_norm = coherence_norm(ss);
    o.N_mean = mean_particle_number(ss, model.spectrum);
    o.min_eigenvalue = min_eigenvalue(ss);
    o.occupation = occupation(ss);
    return o;
}

} // namespace ermea
