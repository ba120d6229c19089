// negf.cpp: Landauer and Keldysh currents of the non-interacting model

#include "ermea/negf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ermea/errors.hpp"
#include "ermea/quadrature.hpp"

namespace ermea {

Eigen::MatrixXcd hybridization(const LeadSpec& lead, double w)
{
    const Eigen::MatrixXd vv = lead.coupling * lead.coupling.transpose();
    return surface_green(lead, w) * vv.cast<std::complex<double>>();
}

Eigen::MatrixXcd hybridization(const std::vector<LeadSpec>& leads, double w)
{
    Eigen::MatrixXcd d = hybridization(leads.at(0), w);
    for (std::size_t a = 1; a < leads.size(); ++a) d += hybridization(leads[a], w);
    return d;
}

Eigen::MatrixXcd broadening(const LeadSpec& lead, double w)
{
    const Eigen::MatrixXcd d = hybridization(lead, w);
    return std::complex<double>(0.0, 1.0) * (d - d.adjoint());
}

Eigen::MatrixXcd retarded_green(const SystemSpec& spec, const std::vector<LeadSpec>& leads, double w)
{
    const int l = spec.sites;
    Eigen::MatrixXcd A = w * Eigen::MatrixXcd::Identity(l, l) - spec.T.cast<std::complex<double>>()
                         - hybridization(leads, w);
    return A.partialPivLu().inverse();
}

double transmission(const SystemSpec& spec, const std::vector<LeadSpec>& leads, double w)
{
    const Eigen::MatrixXcd G = retarded_green(spec, leads, w);
    return (broadening(leads[0], w) * G * broadening(leads[1], w) * G.adjoint()).trace().real();
}

NegfResult negf_current(const SystemSpec& spec, const std::vector<LeadSpec>& leads, double abs_tol,
                        int transmission_samples)
{
    spec.validate();
    if (spec.U.cwiseAbs().maxCoeff() != 0.0)
        throw ValidationError("NEGF oracle valid only non-interacting (U must vanish)");
    if (leads.size() != 2) throw ValidationError("NEGF oracle expects exactly two leads (L, R)");
    for (const auto& l : leads) l.validate(spec.sites);
    const double spin = spec.spinful ? 2.0 : 1.0;
    const auto& L = leads[0];
    const auto& R = leads[1];

    double lo = 1e300, hi = -1e300;
    for (const auto& l : leads) {
        lo = std::min(lo, l.eps_B - 2.0 * l.t_B);
        hi = std::max(hi, l.eps_B + 2.0 * l.t_B);
    }
    std::vector<double> breaks{lo, hi};
    for (const auto& l : leads) {
        breaks.push_back(l.eps_B - 2.0 * l.t_B);
        breaks.push_back(l.eps_B + 2.0 * l.t_B);
        for (double k : {-10.0, -3.0, 0.0, 3.0, 10.0}) breaks.push_back(l.mu + k / l.beta);
    }
    // narrow resonances near the bare levels
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.T);
    for (int k = 0; k < es.eigenvalues().size(); ++k)
        for (double d : {0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1}) {
            breaks.push_back(es.eigenvalues()(k) + d);
            breaks.push_back(es.eigenvalues()(k) - d);
        }
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [&](double x) { return x < lo || x > hi; }),
                 breaks.end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    const double inv2pi = 1.0 / (2.0 * std::numbers::pi);
    const std::complex<double> iu(0.0, 1.0);

    auto landauer = [&](double w) {
        const double df = fermi(+1, w, L.beta, L.mu) - fermi(+1, w, R.beta, R.mu);
        return df == 0.0 ? 0.0 : df * transmission(spec, leads, w);
    };
    auto keldysh = [&](double w) {
        const Eigen::MatrixXcd G = retarded_green(spec, leads, w);
        const Eigen::MatrixXcd gL = broadening(L, w), gR = broadening(R, w);
        const double fL = fermi(+1, w, L.beta, L.mu), fR = fermi(+1, w, R.beta, R.mu);
        const Eigen::MatrixXcd Gless = iu * G * (fL * gL + fR * gR) * G.adjoint();
        return (iu * (gL * (Gless + fL * (G - G.adjoint())))).trace().real();
    };
    auto density = [&](double w) {
        const Eigen::MatrixXcd G = retarded_green(spec, leads, w);
        const double fL = fermi(+1, w, L.beta, L.mu), fR = fermi(+1, w, R.beta, R.mu);
        return (G * (fL * broadening(L, w) + fR * broadening(R, w)) * G.adjoint()).trace().real();
    };

    const int max_intervals = 40000;
    const auto rI = integrate_adaptive(landauer, breaks, abs_tol / (spin * inv2pi), 1e-10, max_intervals);
    const auto rK = integrate_adaptive(keldysh, breaks, abs_tol / (spin * inv2pi), 1e-10, max_intervals);
    const auto rN = integrate_adaptive(density, breaks, abs_tol / (spin * inv2pi), 1e-10, max_intervals);
    if (!rI.converged || !rK.converged || !rN.converged)
        throw NumericalError("NEGF quadrature did not converge; achieved errors " + std::to_string(rI.error) + ", "
                             + std::to_string(rK.error) + ", " + std::to_string(rN.error));

    NegfResult r;
    r.current = spin * inv2pi * rI.value;
    r.current_keldysh = spin * inv2pi * rK.value;
    r.N = spin * inv2pi * rN.value;
    r.error = spin * inv2pi * rI.error;
    for (int k = 0; k < transmission_samples; ++k) {
        const double w = lo + (hi - lo) * (k + 0.5) / transmission_samples;
        r.transmission.emplace_back(w, transmission(spec, leads, w));
    }
    return r;
}

} // namespace ermea
