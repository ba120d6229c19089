#include <doctest.h>

#include <array>
#include <map>

#include <random>

#include "ermea/errors.hpp"
#include "ermea/quality.hpp"
#include "helpers.hpp"
#include "oracle.hpp"

using namespace ermea;
using cd = std::complex<double>;

namespace {

std::vector<LeadSpec> leads3(double V = 0.3)
{
    auto leads = test::two_leads(3, 0, 1, V, 2.0);
    leads[1].coupling(2) = 0.5 * V;
    return leads;
}

IndexSet index_of(const Model& m, std::optional<double> dE, std::optional<double> threshold = std::nullopt)
{
    return build_index_set(m.spectrum, dE, threshold, m.mu_bar);
}

// (C - C^H) / 2 from the dense Choi matrix
double dense_hermiticity(const Generator& gen, int n)
{
    const Eigen::MatrixXcd C = choi_transform(dense_superoperator(gen, n), n);
    return (0.5 * (C - C.adjoint())).norm();
}

// (||C(1 + dt K)||_1 - n) / dt with the identity restricted to the index set
double trace_norm_slope(const Generator& gen, int n, double dt)
{
    Eigen::MatrixXcd D = dt * dense_superoperator(gen, n);
    for (const auto& [a, b] : gen.index->pairs) D(vec_index(a, b, n), vec_index(a, b, n)) += 1.0;
    const Eigen::MatrixXcd C = choi_transform(D, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (C + C.adjoint()), Eigen::EigenvaluesOnly);
    return (es.eigenvalues().cwiseAbs().sum() - gen.index->active_states) / dt;
}

} // namespace

TEST_CASE("W-matrix eigenvalues follow the closed form")
{
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 9;
        Eigen::VectorXcd w(n);
        for (int i = 0; i < n; ++i) w(i) = cd(u(rng), trial % 2 ? u(rng) : 0.0);
        Eigen::MatrixXcd W(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) W(i, j) = w(i) + std::conj(w(j));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(W, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd ev = es.eigenvalues();
        const auto l = w_matrix_eigenvalues(w);
        CHECK(ev(n - 1) == doctest::Approx(l[0]).epsilon(1e-10).scale(1.0));
        CHECK(ev(0) == doctest::Approx(l[1]).epsilon(1e-10).scale(1.0));
        // rank at most two
        for (int k = 1; k + 1 < n; ++k) CHECK(std::abs(ev(k)) <= 1e-10);
    }
    // constant w (secular blocks): one nonnegative eigenvalue, the other zero
    const auto l = w_matrix_eigenvalues(Eigen::VectorXcd::Constant(5, 0.3));
    CHECK(l[0] == doctest::Approx(3.0));
    CHECK(std::abs(l[1]) <= 1e-14);
    // n = 1: {2 Re w, 0}
    const auto one = w_matrix_eigenvalues(Eigen::VectorXcd::Constant(1, cd(0.3, 0.7)));
    CHECK(one[0] == doctest::Approx(0.6));
    CHECK(std::abs(one[1]) <= 1e-15);
}

TEST_CASE("convergence number: untruncated generators have an exact kernel")
{
    const Model model = build_model(test::benzene(false), test::two_leads(6, 0, 2, 0.1, 2.0));
    auto built = build_generator(Variant::CRB, model, index_of(model, std::nullopt));
    REQUIRE(built.gen.size() == 924);
    const auto dense = smallest_eigenvalues(built.gen, 2000, 4);
    const auto arnoldi = smallest_eigenvalues(built.gen, 600, 4);
    CHECK(dense.dense);
    CHECK(!arnoldi.dense);
    CHECK(std::abs(dense.values(0)) <= 1e-12);
    CHECK(std::abs(arnoldi.values(0)) <= 1e-12);
    // conjugate pairs share |lambda|, so match each Arnoldi value to the nearest dense one
    for (int k = 1; k < 3; ++k) {
        double best = 1e300;
        for (int j = 0; j < dense.values.size(); ++j) best = std::min(best, std::abs(arnoldi.values(k) - dense.values(j)));
        CHECK(best <= 1e-8 * std::abs(arnoldi.values(k)));
    }

    // truncated at high bias: leakage out of the low-lying states removes the kernel
    const Model biased = recouple(model, test::two_leads(6, 0, 2, 0.1, 10.0));
    auto cut = build_generator(Variant::CRB, biased, index_of(biased, std::nullopt, biased.chi_min() + 3.0));
    const double nc = convergence_number(cut.gen);
    CHECK(nc > 1e-6);
    CHECK(nc == doctest::Approx(convergence_number(cut.gen, 0)).epsilon(1e-8));
}

TEST_CASE("trace numbers")
{
    const Model model = build_model(test::benzene(false), test::two_leads(6, 0, 2, 0.1, 2.0));
    auto full = build_generator(Variant::CRB, model, index_of(model, 0.2));
    CHECK(trace_number(full.gen) <= 1e-14);
    const double E = model.chi_min() + 3.0;
    auto cut = build_generator(Variant::CRB, model, index_of(model, 0.2, E));
    const double nt = trace_number(cut.gen);
    CHECK(nt > 1e-12);
    CHECK(partial_trace_number(cut.gen, model.chi, 1e300) == doctest::Approx(nt).epsilon(1e-14));
    CHECK(partial_trace_number(cut.gen, model.chi, model.chi_min() - 1.0) == 0.0);
    // the untruncated generator still loses trace from a sub-window, through its boundary
    CHECK(partial_trace_number(full.gen, model.chi, E) > 0.0);
}

TEST_CASE("hermiticity number: zero for every variant, exact for a corrupted entry")
{
    const Model model = build_model(test::three_site(1.3), leads3());
    const int n = model.spectrum.size();
    for (Variant v : {Variant::CRB, Variant::PERLind, Variant::DL}) {
        auto built = build_generator(v, model, index_of(model, v == Variant::DL ? std::optional<double>(0.0) : std::nullopt));
        CHECK(hermiticity_number(built.gen) <= 1e-12);
    }
    auto built = build_generator(Variant::CRB, model, index_of(model, std::nullopt));
    Generator zero = built.gen;
    zero.K.setZero();
    CHECK(hermiticity_number(zero) == 0.0);
    auto& K = built.gen.K;
    const auto& I = *built.index;
    int row = -1, col = -1;
    for (int j = 0; j < K.outerSize() && row < 0; ++j)
        for (SpMat::InnerIterator it(K, j); it; ++it) {
            const auto [a, c] = I.pairs[it.row()];
            if (a != c) {
                row = static_cast<int>(it.row());
                col = j;
                break;
            }
        }
    REQUIRE(row >= 0);
    const double eps = 1e-3;
    K.coeffRef(row, col) += eps;
    CHECK(hermiticity_number(built.gen) == doctest::Approx(eps / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(hermiticity_number(built.gen) == doctest::Approx(dense_hermiticity(built.gen, n)).epsilon(1e-12));
}

TEST_CASE("complete-positivity measures")
{
    const auto spec = test::three_site(1.3);
    const auto leads = leads3(0.3);
    const Model model = build_model(spec, leads);
    const int n = model.spectrum.size();

    for (Variant v : {Variant::PERLind, Variant::DL}) {
        auto built = build_generator(v, model, index_of(model, v == Variant::DL ? std::optional<double>(0.0) : std::nullopt));
        CHECK(nu_m(built.gamma) <= 1e-10);
    }

    // CRB: nu_m against the eigenvalues of the dense Gamma over jump pairs
    auto built = build_generator(Variant::CRB, model, index_of(model, std::nullopt));
    const auto d = test::dense_system(spec, leads);
    // Gamma restricted to jump pairs between one pair of (N, Sz) sectors: entries across
    // different sector pairs never act on block-diagonal states
    std::map<std::array<int, 4>, std::vector<std::pair<int, int>>> jumps;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (std::abs(d.N(a) - d.N(b)) == 1) jumps[{d.N(a), d.Sz(a), d.N(b), d.Sz(b)}].emplace_back(a, b);
    double ref = 0.0;
    for (const auto& [key, J] : jumps) {
        Eigen::MatrixXd G(J.size(), J.size());
        for (std::size_t i = 0; i < J.size(); ++i)
            for (std::size_t j = 0; j < J.size(); ++j)
                G(i, j) = test::gamma(d, Variant::CRB, -1, J[i].first, J[i].second, J[j].first, J[j].second);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
        for (int k = 0; k < es.eigenvalues().size(); ++k) ref += std::abs(es.eigenvalues()(k)) - es.eigenvalues()(k);
    }
    const double nm = nu_m(built.gamma);
    CHECK(nm > 1e-8);
    CHECK(nm == doctest::Approx(ref).epsilon(1e-9));

    CHECK(positivity_metrics(built.gamma, built.gen).nu_m == nm);

    // truncated generator, so that the trace of C(K) is nonzero
    auto cut = build_generator(Variant::CRB, model, index_of(model, std::nullopt, model.chi_min() + 2.5));
    const auto p = positivity_metrics(cut.gamma, cut.gen);
    const double scale = std::max(p.nu_m, std::abs(p.nu_tc));
    REQUIRE(scale > 1e-8);
    // trace-norm slope of C(1 + dt K) by finite differences, first-order error removed
    const double h = 1e-5;
    const double slope = 2.0 * trace_norm_slope(cut.gen, n, h / 2) - trace_norm_slope(cut.gen, n, h);
    CHECK(std::abs(p.nu_mt - slope) <= 1e-5 * scale);
    const Eigen::MatrixXcd C = choi_transform(dense_superoperator(cut.gen, n), n);
    CHECK(std::abs(p.nu_tc + C.trace().real()) <= 1e-12 * scale);
    CHECK(std::abs(p.nu_tc - (p.nu_m - p.nu_mt)) <= 1e-6 * scale);
}

TEST_CASE("positivity number")
{
    const Model model = build_model(test::three_site(1.3), leads3());
    auto dl = build_generator(Variant::DL, model, index_of(model, 0.0));
    const double t = 1.0 / dl.gen.K.norm();
    CHECK(std::abs(positivity_number(dl.gen, t)) <= 1e-10);
    CHECK(std::abs(positivity_number(dl.gen, 50.0 * t)) <= 1e-10);

    // K = lambda * identity: exp(K t) = e^{lambda t}
    Generator g = dl.gen;
    SpMat id(g.size(), g.size());
    id.setIdentity();
    g.K = 0.5 * id;
    CHECK(positivity_number(g, 2.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-10));
    g.K = -0.5 * id;
    CHECK(positivity_number(g, 2.0) == doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-10));
    g.K.setZero();
    CHECK(std::abs(positivity_number(g, 1.0)) <= 1e-14);
    // pure commutator: unitary conjugation
    SpMat C(g.size(), g.size());
    const auto& I = *g.index;
    for (int p = 0; p < I.size(); ++p)
        C.insert(p, p) = cd(0.0, -(model.spectrum.E[I.pairs[p].first] - model.spectrum.E[I.pairs[p].second]));
    g.K = C;
    CHECK(std::abs(positivity_number(g, 3.0)) <= 1e-12);
    CHECK(convergence_number(g) == 0.0);
    CHECK_THROWS_AS(positivity_number(dl.gen, t, 4), CapacityError);
}

TEST_CASE("quality report collects the individual measures")
{
    const Model model = build_model(test::three_site(1.3), leads3());
    auto built = build_generator(Variant::CRB, model, index_of(model, 0.5, model.chi_min() + 2.5));
    QualityOptions opt;
    opt.nu_p = true;
    opt.partial_thresholds = {model.chi_min() + 1.0};
    const auto q = quality_report(built.gen, built.gamma, model.chi, opt);
    CHECK(q.N == built.index->size());
    CHECK(q.nu_c == doctest::Approx(convergence_number(built.gen)));
    CHECK(q.nu_t == trace_number(built.gen));
    CHECK(q.nu_h == hermiticity_number(built.gen));
    CHECK(q.nu_m == nu_m(built.gamma));
    REQUIRE(q.nu_t_partial.size() == 1);
    CHECK(q.nu_t_partial[0].second == partial_trace_number(built.gen, model.chi, model.chi_min() + 1.0));
    REQUIRE(q.nu_p.has_value());
    CHECK(q.nu_p_time == doctest::Approx(1.0 / built.gen.K.norm()));
}

TEST_CASE("dissipativity of an untruncated generator")
{
    const Model model = build_model(test::three_site(1.3), leads3());
    for (Variant v : {Variant::CRB, Variant::PERLind, Variant::DL}) {
        auto built = build_generator(v, model, index_of(model, v == Variant::DL ? std::optional<double>(0.0) : std::nullopt));
        const auto c = dissipativity(built.gen, 1e-10);
        CHECK(c.near_zero == 1);
        CHECK(c.max_real_other < 0.0);
    }
}
