// bath.cpp: Lead Green functions and principal-value kernels

#include "ermea/bath.hpp"

#include <cmath>
#include <numbers>

#include "ermea/errors.hpp"
#include "ermea/quadrature.hpp"

namespace ermea {

void LeadSpec::validate(int sites) const
{
    const std::string where = "lead '" + id + "': ";
    if (!(t_B > 0.0)) throw ValidationError(where + "t_B must be > 0");
    if (!(beta > 0.0)) throw ValidationError(where + "beta must be > 0");
    if (coupling.size() != sites)
        throw ValidationError(where + "coupling needs one entry per site");
    if (coupling.cwiseAbs().maxCoeff() == 0.0)
        throw ValidationError(where + "at least one nonzero coupling required");
}

std::complex<double> surface_green(const LeadSpec& lead, double w)
{
    const double x = w - lead.eps_B;
    const double t2 = lead.t_B * lead.t_B;
    const double disc = 4.0 * t2 - x * x;
    if (disc > 0.0) return {x / (2.0 * t2), -std::sqrt(disc) / (2.0 * t2)};
    // decaying branch; written to avoid cancellation for |x| >> 2t
    const double r = std::sqrt(-disc);
    const double g = (x > 0.0) ? 2.0 / (x + r) : 2.0 / (x - r);
    return {g, 0.0};
}

double spectral_density(const LeadSpec& lead, double w)
{
    const double x = w - lead.eps_B;
    const double disc = 4.0 * lead.t_B * lead.t_B - x * x;
    return disc > 0.0 ? std::sqrt(disc) / (lead.t_B * lead.t_B) : 0.0;
}

double fermi(int s, double x, double beta, double mu)
{
    const double z = (s > 0 ? 1.0 : -1.0) * beta * (x - mu);
    if (z > 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

double occupation(const LeadSpec& lead, int s, double w)
{
    const double x = s * w;
    const double a = spectral_density(lead, x);
    return a > 0.0 ? a * fermi(-s, x, lead.beta, lead.mu) : 0.0;
}

double principal_value(const LeadSpec& lead, int s, double w, double abs_tol, double* error)
{
    // x = eps - 2t cos(theta): A(x) dx = 4 sin^2(theta) dtheta, no edge singularities left
    const double t = lead.t_B;
    const double c = w - s * lead.eps_B; // q(theta) = c + 2ts cos(theta)
    auto x_of = [&](double th) { return lead.eps_B - 2.0 * t * std::cos(th); };
    auto h = [&](double th) {
        const double sn = std::sin(th);
        return 4.0 * sn * sn * fermi(-s, x_of(th), lead.beta, lead.mu);
    };

    std::vector<double> breaks{0.0, std::numbers::pi};
    auto add_energy_break = [&](double x) {
        const double cs = (lead.eps_B - x) / (2.0 * t);
        if (cs > -1.0 && cs < 1.0) breaks.push_back(std::acos(cs));
    };
    const double width = 1.0 / lead.beta;
    for (double k : {-8.0, -2.0, 0.0, 2.0, 8.0}) add_energy_break(lead.mu + k * width);

    QuadResult r;
    const double cs0 = -c / (2.0 * t * s);
    if (cs0 > -1.0 && cs0 < 1.0) {
        const double th0 = std::acos(cs0);
        const double h0 = h(th0);
        breaks.push_back(th0);
        // PV int_0^pi dtheta / (c + d cos theta) = 0 for |c| < |d|
        auto g = [&](double th) {
            const double q = -4.0 * t * s * std::sin(0.5 * (th + th0)) * std::sin(0.5 * (th - th0));
            return q == 0.0 ? 0.0 : (h(th) - h0) / q;
        };
        r = integrate_adaptive(g, breaks, abs_tol);
    } else {
        auto g = [&](double th) {
            const double q = c + 2.0 * t * s * std::cos(th);
            return q == 0.0 ? 0.0 : h(th) / q;
        };
        r = integrate_adaptive(g, breaks, abs_tol);
    }
    if (error) *error = r.error;
    if (!r.converged)
        throw NumericalError("principal value quadrature did not reach tolerance; achieved error "
                             + std::to_string(r.error));
    return r.value;
}

BathKernel::BathKernel(std::vector<LeadSpec> leads, int sites, bool spinful, QuadratureConfig quad)
    : leads_(std::move(leads)), orbitals_(spinful ? 2 * sites : sites), quad_(quad)
{
    if (leads_.empty()) throw ValidationError("at least one lead required");
    for (std::size_t a = 0; a < leads_.size(); ++a) {
        leads_[a].validate(sites);
        for (int sp = 0; sp < (spinful ? 2 : 1); ++sp) {
            Channel ch;
            ch.lead = static_cast<int>(a);
            ch.spin = sp;
            ch.coupling = Eigen::VectorXd::Zero(orbitals_);
            for (int i = 0; i < sites; ++i) ch.coupling(orbital_index(i, sp, spinful)) = leads_[a].coupling(i);
            channels_.push_back(std::move(ch));
        }
    }
}

double BathKernel::occupation(int lead, int s, double w) const
{
    return ermea::occupation(leads_[lead], s, w);
}

double BathKernel::principal_value(int lead, int s, double w) const
{
    const auto key = static_cast<std::uint64_t>(std::llround(w / quad_.cache_resolution)) * 1024u
                     + static_cast<std::uint64_t>(lead) * 2u + (s > 0 ? 1u : 0u);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    const double v = ermea::principal_value(leads_[lead], s, w, quad_.abs_tol);
    std::lock_guard<std::mutex> lock(mutex_);
    cache_.emplace(key, v);
    return v;
}

Eigen::MatrixXcd BathKernel::gamma(int s, double w) const
{
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(orbitals_, orbitals_);
    for (const auto& ch : channels_) {
        const double o = occupation(ch.lead, s, w);
        if (o != 0.0) g += (o * ch.coupling * ch.coupling.transpose()).cast<std::complex<double>>();
    }
    return g;
}

Eigen::MatrixXcd BathKernel::sigma(int s, double w) const
{
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(orbitals_, orbitals_);
    const std::complex<double> pref(0.0, 1.0 / std::numbers::pi);
    for (const auto& ch : channels_) {
        const double p = principal_value(ch.lead, s, w);
        g += pref * (p * ch.coupling * ch.coupling.transpose()).cast<std::complex<double>>();
    }
    return g;
}

std::complex<double> BathKernel::gamma_hermitian(int s, int mu, int kappa, double w) const
{
    double v = 0.0;
    for (const auto& ch : channels_)
        if (ch.coupling(mu) != 0.0 && ch.coupling(kappa) != 0.0)
            v += ch.coupling(mu) * occupation(ch.lead, s, w) * ch.coupling(kappa);
    return v;
}

std::complex<double> BathKernel::sigma_antihermitian(int s, int mu, int kappa, double w) const
{
    double v = 0.0;
    for (const auto& ch : channels_)
        if (ch.coupling(mu) != 0.0 && ch.coupling(kappa) != 0.0)
            v += ch.coupling(mu) * principal_value(ch.lead, s, w) * ch.coupling(kappa);
    return {0.0, v / std::numbers::pi};
}

std::size_t BathKernel::cache_size() const
{
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.size();
}

} // namespace ermea
