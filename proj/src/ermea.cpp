// ermea.cpp: Truncation loop over chi levels and steady-state extraction

#include "ermea/ermea.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ermea/linalg.hpp"

namespace ermea {

void ErmeaConfig::validate() const
{
    if (!(delta > 0.0)) throw ValidationError("ermea: delta must be > 0");
    if (delta_E && *delta_E < 0.0) throw ValidationError("ermea: delta_E must be >= 0");
    if (growth < 1) throw ValidationError("ermea: growth must be >= 1");
    if (max_dimension < 1) throw ValidationError("ermea: max_dimension must be >= 1");
}

Eigen::MatrixXcd SteadyState::block(int B) const
{
    const auto& I = index();
    const auto m = static_cast<Eigen::Index>(I.blocks[B].size());
    Eigen::MatrixXcd s(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) s(i, j) = sigma(I.block_pos[B](i, j));
    return s;
}

Eigen::MatrixXcd SteadyState::dense(int n_states) const
{
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n_states, n_states);
    const auto& I = index();
    for (int p = 0; p < I.size(); ++p) s(I.pairs[p].first, I.pairs[p].second) = sigma(p);
    return s;
}

GammaTensor restrict_gamma(const GammaTensor& gamma, const IndexSet& big, const IndexSet& small)
{
    const int nb = static_cast<int>(small.blocks.size());
    GammaTensor g;
    g.variant = gamma.variant;
    g.leads = gamma.leads;
    for (const auto& gb : gamma.blocks) {
        if (gb.P >= nb || gb.Q >= nb) continue;
        const int np = static_cast<int>(small.blocks[gb.P].size());
        const int nq = static_cast<int>(small.blocks[gb.Q].size());
        const int nqb = static_cast<int>(big.blocks[gb.Q].size());
        Eigen::MatrixXd m(np * nq, np * nq);
        for (int ia = 0; ia < np; ++ia)
            for (int ib = 0; ib < nq; ++ib)
                for (int ic = 0; ic < np; ++ic)
                    for (int id = 0; id < nq; ++id)
                        m(ia * nq + ib, ic * nq + id) = gb.g(ia * nqb + ib, ic * nqb + id);
        g.blocks.push_back({gb.lead, gb.s, gb.P, gb.Q, std::move(m)});
    }
    g.trace13.resize(gamma.trace13.size());
    for (std::size_t l = 0; l < gamma.trace13.size(); ++l)
        for (int s = 0; s < 2; ++s)
            for (int B = 0; B < nb; ++B) {
                const auto m = static_cast<Eigen::Index>(small.blocks[B].size());
                g.trace13[l][s].push_back(gamma.trace13[l][s][B].topLeftCorner(m, m));
            }
    return g;
}

SteadyState solve_steady_state(const Model& model, BuiltGenerator built, const QualityOptions& quality,
                               bool with_report)
{
    SteadyState ss;
    ss.built = std::move(built);
    const auto& I = *ss.built.index;
    const auto& K = ss.built.gen.K;
    const int N = I.size();

    Eigen::VectorXcd t = Eigen::VectorXcd::Zero(N);
    for (int p : I.diagonal) t(p) = 1.0;
    Eigen::VectorXcd x = bordered_kernel_solve(K, t);
    const cplx tr = t.dot(x);
    if (std::abs(tr) < 1e-12 * x.norm())
        throw DegenerateKernelError("kernel vector has zero trace; the steady state is not unique");
    x /= tr;

    // independent kernel vector from the eigensolver
    Eigen::VectorXcd y;
    if (N <= quality.dense_crossover || N < 5) {
        Eigen::VectorXcd w;
        Eigen::MatrixXcd V;
        dense_eigen(Eigen::MatrixXcd(K), w, V);
        Eigen::Index k;
        w.cwiseAbs().minCoeff(&k);
        y = V.col(k);
    } else {
        double scale = 0.0;
        for (int i = 0; i < N; ++i) scale = std::max(scale, std::abs(K.coeff(i, i)));
        const cplx shift = cplx(1.0, 1.0) * (1e-10 * std::max(scale, 1e-300));
        y = shift_invert_eigs(K, 2, shift, true).vectors.col(0);
    }
    const cplx ty = t.dot(y);
    if (std::abs(ty) > 1e-300) {
        y /= ty;
        ss.solver_disagreement = (x - y).norm() / x.norm();
    } else {
        ss.solver_disagreement = std::numeric_limits<double>::infinity();
    }
    if (ss.solver_disagreement > 1e-8)
        ss.warnings.push_back("bordered solve and Arnoldi kernel vector differ by "
                              + std::to_string(ss.solver_disagreement));

    double defect = 0.0;
    Eigen::VectorXcd h = x;
    for (int p = 0; p < N; ++p) {
        const int q = I.find(I.pairs[p].second, I.pairs[p].first);
        defect += std::norm(x(p) - std::conj(x(q)));
        h(p) = 0.5 * (x(p) + std::conj(x(q)));
    }
    ss.hermiticity_defect = std::sqrt(defect);
    ss.sigma = h;

    if (with_report) {
        ss.report = quality_report(ss.built.gen, ss.built.gamma, model.chi, quality);
        if (ss.report.lambda2 < 1e3 * ss.report.nu_c)
            ss.warnings.push_back("second smallest |lambda| is within 10^3 of nu_c; kernel may not be unique");
        if (std::abs(ss.report.nu_tc - (ss.report.nu_m - ss.report.nu_mt)) > 1e-8)
            ss.warnings.push_back("nu_tc differs from nu_m - nu_mt by more than 1e-8");
    }
    return ss;
}

SteadyState steady_state_on(const Model& model, Variant v, IndexSet index, const QualityOptions& quality, bool lamb,
                            bool with_report)
{
    return solve_steady_state(model, build_generator(v, model, std::move(index), lamb), quality, with_report);
}

SteadyState run_ermea(const Model& model, const ErmeaConfig& cfg)
{
    cfg.validate();
    const auto& sp = model.spectrum;
    const auto& order = model.order;
    const int L = order.levels();
    const double E2 = model.chi_min() + cfg.E2_offset;
    const double inf = std::numeric_limits<double>::infinity();

    // |I| after each level; the index set of a lower level is a prefix of any higher one
    const auto cluster = secular_clusters(sp, cfg.delta_E);
    std::vector<long> csize(*std::max_element(cluster.begin(), cluster.end()) + 1, 0);
    std::vector<long> prefix(L + 1, 0);
    for (int lev = 0; lev < L; ++lev) {
        long acc = prefix[lev];
        for (int r = order.level_start[lev]; r < order.level_start[lev + 1]; ++r) {
            const int c = cluster[order.order[r]];
            acc += 2 * csize[c] + 1;
            ++csize[c];
        }
        prefix[lev + 1] = acc;
    }
    auto cut_at = [&](int lev) { return std::max(E2, lev < L ? order.level_chi[lev] : inf); };
    auto index_at = [&](int lev) {
        return build_index_set_levels(sp, order, cfg.delta_E, lev, E2, model.mu_bar);
    };

    std::optional<BuiltGenerator> horizon;
    int h = 0;
    std::vector<TraceRow> trace;
    int k = std::min(cfg.growth, L);
    int last = 0;
    bool converged = false;
    while (true) {
        if (prefix[k] > cfg.max_dimension) break;
        if (!horizon || k > h || cut_at(k) != cut_at(h)) {
            int hn = k;
            while (hn < L && prefix[hn] < 2 * prefix[k] && prefix[hn + 1] <= cfg.max_dimension
                   && cut_at(hn + 1) == cut_at(k))
                ++hn;
            horizon = build_generator(cfg.variant, model, index_at(hn), cfg.lamb_shift);
            h = hn;
        }
        const IndexSet Ik = index_at(k);
        Generator gk;
        gk.variant = cfg.variant;
        gk.index = &Ik;
        gk.K = horizon->gen.K.topLeftCorner(prefix[k], prefix[k]);
        gk.K.makeCompressed();

        TraceRow row;
        row.levels = k;
        row.threshold = Ik.threshold.value_or(inf);
        row.N = Ik.size();
        row.n = Ik.active_states;
        const auto small = smallest_eigenvalues(gk, cfg.quality.dense_crossover, 2);
        row.nu_c = std::abs(small.values(0));
        row.lambda2 = small.values.size() > 1 ? std::abs(small.values(1)) : inf;
        row.nu_t = trace_number(gk);
        row.nu_m = nu_m(restrict_gamma(horizon->gamma, *horizon->index, Ik));
        trace.push_back(row);
        last = k;
        // a second near-zero eigenvalue means disconnected groups of states: the kernel is not unique yet
        if (row.nu_c <= cfg.delta && row.lambda2 > cfg.delta) {
            converged = true;
            break;
        }
        if (k == L) break;
        k = std::min(L, k + cfg.growth);
    }
    if (last == 0) throw CapacityError("ermea: the first chi level already exceeds max_dimension");

    auto ss = std::make_shared<SteadyState>(
        solve_steady_state(model, build_generator(cfg.variant, model, index_at(last), cfg.lamb_shift), cfg.quality));
    ss->trace = std::move(trace);
    ss->converged = converged;
    if (!converged) {
        throw NonConvergenceError("ermea: no convergence to nu_c <= " + std::to_string(cfg.delta)
                                      + " (best nu_c " + std::to_string(ss->report.nu_c) + " at |I| = "
                                      + std::to_string(ss->report.N) + ")",
                                  ss);
    }
    return std::move(*ss);
}

double embedding_check(const SteadyState& ss, const Generator& full)
{
    const auto& If = *full.index;
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(If.size());
    const auto& I = ss.index();
    for (int p = 0; p < I.size(); ++p) {
        const int q = If.find(I.pairs[p].first, I.pairs[p].second);
        if (q < 0) throw ValidationError("embedding: index set is not contained in the full index set");
        x(q) = ss.sigma(p);
    }
    return (full.K * x).norm() / full.K.norm();
}

} // namespace ermea
