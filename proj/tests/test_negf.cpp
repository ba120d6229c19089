#include <doctest.h>

#include <random>

#include "ermea/errors.hpp"
#include "ermea/negf.hpp"
#include "helpers.hpp"

using namespace ermea;
using cd = std::complex<double>;

TEST_CASE("hybridization of one coupled site at the band centre")
{
    const LeadSpec l = test::lead("L", 3, 0, 0.1, 0.0);
    const Eigen::MatrixXcd D = hybridization(l, 0.0);
    CHECK(std::abs(D(0, 0) - cd(0.0, -0.01 / 6.0)) <= 1e-15);
    CHECK(D.cwiseAbs().sum() == doctest::Approx(0.01 / 6.0));
    // outside the band: real, no broadening
    const Eigen::MatrixXcd Dout = hybridization(l, 13.0);
    CHECK(Dout.imag().norm() == 0.0);
    CHECK(broadening(l, 13.0).norm() == 0.0);

    const auto leads = test::two_leads(3, 0, 2, 0.1, 1.0);
    const double w = 0.7;
    CHECK((hybridization(leads, w) - hybridization(leads[0], w) - hybridization(leads[1], w)).norm() == 0.0);
    const Eigen::MatrixXcd G = broadening(leads[0], w);
    CHECK((G - G.adjoint()).norm() <= 1e-16);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
    CHECK(es.eigenvalues().minCoeff() >= -1e-16);
}

TEST_CASE("transmission is bounded by the channel count and vanishes outside the band")
{
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        auto spec = test::chain(3, k % 2);
        spec.T = Eigen::MatrixXd::Random(3, 3);
        spec.T = 0.5 * (spec.T + spec.T.transpose()).eval();
        auto leads = test::two_leads(3, 0, 2, 0.5 + u(rng), 1.0);
        leads[0].coupling(1) = u(rng);
        const double w = 14.0 * u(rng);
        const double T = transmission(spec, leads, w);
        CHECK(T >= -1e-14);
        CHECK(T <= 1.0 + 1e-12);
        CHECK(transmission(spec, leads, 12.5 + std::abs(u(rng))) == 0.0);
    }
    // a single resonant level symmetrically coupled: T = 1 on resonance in the wide band
    SystemSpec dot = test::chain(1, false);
    const auto leads = test::two_leads(1, 0, 0, 0.5, 0.0);
    CHECK(transmission(dot, leads, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Landauer current: zero bias, antisymmetry, Keldysh form")
{
    const auto spec = test::three_site();
    {
        const auto r = negf_current(spec, test::two_leads(3, 0, 1, 0.1, 0.0));
        CHECK(std::abs(r.current) <= 1e-12);
    }
    // mirror-symmetric chain: swapping the lead roles flips the current
    auto sym = test::chain(3, false);
    const auto fw = negf_current(sym, test::two_leads(3, 0, 2, 0.1, 2.0));
    const auto bw = negf_current(sym, test::two_leads(3, 0, 2, 0.1, -2.0));
    CHECK(fw.current == doctest::Approx(-bw.current).epsilon(1e-10));
    CHECK(fw.current < 0.0);

    std::mt19937 rng(43);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 5; ++k) {
        auto s = test::chain(3, false);
        s.T = Eigen::MatrixXd::Random(3, 3) * 2.0;
        s.T = 0.5 * (s.T + s.T.transpose()).eval();
        auto leads = test::two_leads(3, 0, 2, 0.3, 3.0 * u(rng), 5.0 + 20.0 * std::abs(u(rng)));
        leads[1].coupling(1) = 0.2 * u(rng);
        const auto r = negf_current(s, leads);
        CHECK(r.current == doctest::Approx(r.current_keldysh).epsilon(1e-8));
        CHECK(r.N >= 0.0);
        CHECK(r.N <= 3.0);
    }
}

TEST_CASE("spinful systems count both spin species")
{
    auto spinless = test::three_site();
    auto spinful = spinless;
    spinful.spinful = true;
    const auto leads = test::two_leads(3, 0, 1, 0.1, 2.0);
    const auto a = negf_current(spinless, leads), b = negf_current(spinful, leads);
    CHECK(b.current == doctest::Approx(2.0 * a.current).epsilon(1e-9));
    CHECK(b.N == doctest::Approx(2.0 * a.N).epsilon(1e-9));
}

TEST_CASE("transmission samples on request")
{
    const auto r = negf_current(test::three_site(), test::two_leads(3, 0, 1, 0.1, 2.0), 1e-12, 11);
    CHECK(r.transmission.size() == 11);
    for (const auto& [w, T] : r.transmission) {
        CHECK(T >= 0.0);
        CHECK(T <= 1.0 + 1e-12);
    }
}

TEST_CASE("interacting systems are refused")
{
    CHECK_THROWS_AS(negf_current(test::three_site(0.5), test::two_leads(3, 0, 1, 0.1, 2.0)), ValidationError);
    CHECK_THROWS_AS(negf_current(test::three_site(), {test::lead("L", 3, 0, 0.1, 0.0)}), ValidationError);
}
