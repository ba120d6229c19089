// quality.cpp: nu_c, nu_t, nu_h, nu_m, nu_mt, nu_tc, nu_p

#include "ermea/quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "ermea/errors.hpp"
#include "ermea/linalg.hpp"

namespace ermea {

namespace {

Eigen::MatrixXcd to_dense(const SpMat& K)
{
    return Eigen::MatrixXcd(K);
}

std::vector<char> diagonal_mask(const IndexSet& I)
{
    std::vector<char> d(I.size(), 0);
    for (int p : I.diagonal) d[p] = 1;
    return d;
}

} // namespace

SmallEigenvalues smallest_eigenvalues(const Generator& gen, int dense_crossover, int nev)
{
    SmallEigenvalues r;
    const int N = gen.size();
    if (N <= dense_crossover || N < nev + 3) {
        Eigen::VectorXcd w = dense_eigenvalues(to_dense(gen.K));
        std::sort(w.data(), w.data() + w.size(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
        r.values = w;
        r.dense = true;
        return r;
    }
    double scale = 0.0;
    for (int i = 0; i < N; ++i) scale = std::max(scale, std::abs(gen.K.coeff(i, i)));
    if (scale == 0.0) scale = 1.0;
    // keep (K - shift) regular even when K has an exact kernel
    const cplx shift = cplx(1.0, 1.0) * (1e-10 * scale);
    r.values = shift_invert_eigs(gen.K, nev, shift).values;
    return r;
}

double convergence_number(const Generator& gen, int dense_crossover)
{
    if (gen.size() == 0) return 0.0;
    return std::abs(smallest_eigenvalues(gen, dense_crossover, 2).values(0));
}

double trace_number(const Generator& gen)
{
    const auto& I = *gen.index;
    if (I.size() == 0) return 0.0;
    const auto diag = diagonal_mask(I);
    Eigen::VectorXcd colsum = Eigen::VectorXcd::Zero(I.size());
    for (int j = 0; j < gen.K.outerSize(); ++j)
        for (SpMat::InnerIterator it(gen.K, j); it; ++it)
            if (diag[it.row()]) colsum(it.col()) += it.value();
    return colsum.cwiseAbs().sum() / (double(I.size()) * double(I.active_states));
}

double partial_trace_number(const Generator& gen, const std::vector<double>& chi, double E)
{
    const auto& I = *gen.index;
    std::vector<char> in(I.size(), 0);
    long nN = 0, nd = 0;
    for (int p = 0; p < I.size(); ++p) {
        const auto [a, b] = I.pairs[p];
        if (chi[a] < E && chi[b] < E) {
            in[p] = 1;
            ++nN;
            if (a == b) ++nd;
        }
    }
    if (nN == 0) return 0.0;
    Eigen::VectorXcd colsum = Eigen::VectorXcd::Zero(I.size());
    for (int j = 0; j < gen.K.outerSize(); ++j) {
        if (!in[j]) continue;
        for (SpMat::InnerIterator it(gen.K, j); it; ++it) {
            const auto [a, b] = I.pairs[it.row()];
            if (a == b && in[it.row()]) colsum(j) += it.value();
        }
    }
    return colsum.cwiseAbs().sum() / (double(nN) * double(nd));
}

double hermiticity_number(const Generator& gen)
{
    // C(K)_{(a,b),(c,d)} = K_{(a,c),(b,d)}; its adjoint partner is K_{(c,a),(d,b)}
    const auto& I = *gen.index;
    double sum = 0.0;
    for (int j = 0; j < gen.K.outerSize(); ++j)
        for (SpMat::InnerIterator it(gen.K, j); it; ++it) {
            const auto [a, c] = I.pairs[it.row()];
            const auto [b, d] = I.pairs[it.col()];
            const int i2 = I.find(c, a), j2 = I.find(d, b);
            const cplx partner = (i2 < 0 || j2 < 0) ? cplx(0.0) : gen.K.coeff(i2, j2);
            sum += std::norm(it.value() - std::conj(partner));
            if (partner == 0.0) sum += std::norm(it.value()); // the partner position is absent from K
        }
    return 0.5 * std::sqrt(sum);
}

double nu_m(const GammaTensor& gamma)
{
    std::map<std::pair<int, int>, Eigen::MatrixXd> total;
    for (const auto& gb : gamma.blocks) {
        auto key = std::make_pair(gb.P, gb.Q);
        auto it = total.find(key);
        if (it == total.end()) total.emplace(key, gb.g);
        else it->second += gb.g;
    }
    double neg = 0.0;
    for (const auto& [key, g] : total) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw NumericalError("Gamma block eigensolve failed");
        for (int k = 0; k < es.eigenvalues().size(); ++k)
            if (es.eigenvalues()(k) < 0.0) neg += es.eigenvalues()(k);
    }
    return -2.0 * neg;
}

std::array<double, 2> w_matrix_eigenvalues(const Eigen::VectorXcd& w)
{
    // on span{w, 1}: W w = S w + |w|^2 1, W 1 = n w + conj(S) 1
    const cplx S = w.sum();
    const double r = std::sqrt(std::max(0.0, double(w.size()) * w.squaredNorm() - S.imag() * S.imag()));
    return {S.real() + r, S.real() - r};
}

PositivityMetrics positivity_metrics(const GammaTensor& gamma, const Generator& gen)
{
    const auto& I = *gen.index;
    for (const auto& gb : gamma.blocks)
        if (gb.P == gb.Q) throw ValidationError("Gamma block inside a single sector block");

    PositivityMetrics r;
    r.nu_m = nu_m(gamma);

    const auto diag = diagonal_mask(I);
    double trC = 0.0; // Tr C(K) = sum of K over diagonal rows and columns
    for (int j = 0; j < gen.K.outerSize(); ++j) {
        if (!diag[j]) continue;
        for (SpMat::InnerIterator it(gen.K, j); it; ++it)
            if (diag[it.row()]) trC += it.value().real();
    }

    // C(1 + dt K) is block diagonal over block pairs (P, Q). For P != Q it is dt Gamma_PQ, so its
    // negative part scales exactly with dt. A P == P block is Omega Omega^H + dt (Y Omega^H + Omega Y^H)
    // with Omega = sum_a |aa>; its single negative eigenvalue is -dt^2 |x_r|^2 / (m + dt x_11) + O(dt^3),
    // where x = C(K) Omega / sqrt(m) split along Omega and its complement.
    std::vector<Eigen::MatrixXcd> z(I.blocks.size()); // z_(a,b) = sum_c K_{(a,c),(b,c)}
    for (std::size_t B = 0; B < I.blocks.size(); ++B) {
        const auto m = static_cast<Eigen::Index>(I.blocks[B].size());
        z[B] = Eigen::MatrixXcd::Zero(m, m);
    }
    for (int j = 0; j < gen.K.outerSize(); ++j)
        for (SpMat::InnerIterator it(gen.K, j); it; ++it) {
            const auto [a, c] = I.pairs[it.row()];
            const auto [b, d] = I.pairs[it.col()];
            if (c != d || I.block_of[a] != I.block_of[b]) continue;
            z[I.block_of[a]](I.slot_of[a], I.slot_of[b]) += it.value();
        }
    std::vector<double> xr2(I.blocks.size(), 0.0), x11(I.blocks.size(), 0.0);
    for (std::size_t B = 0; B < I.blocks.size(); ++B) {
        const double m = double(I.blocks[B].size());
        const cplx proj = z[B].trace() / std::sqrt(m); // omega_hat^H z
        x11[B] = proj.real() / std::sqrt(m);
        xr2[B] = std::max(0.0, (z[B].squaredNorm() - std::norm(proj)) / m);
    }
    const double dt1 = 1e-6, dt2 = 1e-7;
    auto L = [&](double dt) {
        double v = 0.5 * r.nu_m;
        for (std::size_t B = 0; B < I.blocks.size(); ++B)
            v += dt * xr2[B] / (double(I.blocks[B].size()) + dt * x11[B]);
        return v;
    };
    const double L0 = (10.0 * L(dt2) - L(dt1)) / 9.0;
    r.nu_mt = trC + 2.0 * L0;
    r.nu_tc = -trC;
    return r;
}

double positivity_number(const Generator& gen, double t, int cap, int starts, unsigned seed)
{
    const auto& I = *gen.index;
    const int N = gen.size();
    if (N > cap) throw CapacityError("positivity number: generator dimension " + std::to_string(N)
                                     + " exceeds the dense cap " + std::to_string(cap));
    if (N == 0 || I.blocks.empty()) return 0.0;
    const Eigen::MatrixXcd E = (to_dense(gen.K) * t).exp();
    const Eigen::MatrixXcd EH = E.adjoint();

    auto block_matrix = [&](const Eigen::VectorXcd& x, int B) {
        const int m = static_cast<int>(I.blocks[B].size());
        Eigen::MatrixXcd M(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) M(i, j) = x(I.block_pos[B](i, j));
        return M;
    };

    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss;
    std::uniform_int_distribution<int> pick(0, static_cast<int>(I.blocks.size()) - 1);
    double best = 0.0;
    for (int s = 0; s < starts; ++s) {
        int B = pick(rng);
        const int m = static_cast<int>(I.blocks[B].size());
        Eigen::VectorXcd v(m), w(m);
        for (int i = 0; i < m; ++i) {
            v(i) = cplx(gauss(rng), gauss(rng));
            w(i) = cplx(gauss(rng), gauss(rng));
        }
        v.normalize();
        w.normalize();
        double last = -1.0;
        for (int iter = 0; iter < 200; ++iter) {
            Eigen::VectorXcd x = Eigen::VectorXcd::Zero(N);
            for (int i = 0; i < v.size(); ++i)
                for (int j = 0; j < w.size(); ++j) x(I.block_pos[B](i, j)) = v(i) * std::conj(w(j));
            const Eigen::VectorXcd y = E * x;
            double norm1 = 0.0;
            Eigen::VectorXcd u = Eigen::VectorXcd::Zero(N);
            for (std::size_t C = 0; C < I.blocks.size(); ++C) {
                Eigen::JacobiSVD<Eigen::MatrixXcd> svd(block_matrix(y, static_cast<int>(C)),
                                                       Eigen::ComputeFullU | Eigen::ComputeFullV);
                norm1 += svd.singularValues().sum();
                const Eigen::MatrixXcd U = svd.matrixU() * svd.matrixV().adjoint();
                for (int i = 0; i < U.rows(); ++i)
                    for (int j = 0; j < U.cols(); ++j) u(I.block_pos[C](i, j)) = U(i, j);
            }
            best = std::max(best, norm1);
            if (norm1 <= last + 1e-13) break;
            last = norm1;
            // Re Tr(U^H Phi(v w^H)) = Re v^H M w with M the adjoint map applied to U
            const Eigen::VectorXcd y2 = EH * u;
            double top = -1.0;
            for (std::size_t C = 0; C < I.blocks.size(); ++C) {
                Eigen::JacobiSVD<Eigen::MatrixXcd> svd(block_matrix(y2, static_cast<int>(C)),
                                                       Eigen::ComputeFullU | Eigen::ComputeFullV);
                if (svd.singularValues()(0) > top) {
                    top = svd.singularValues()(0);
                    B = static_cast<int>(C);
                    v = svd.matrixU().col(0);
                    w = svd.matrixV().col(0);
                }
            }
        }
    }
    return best - 1.0;
}

QualityReport quality_report(const Generator& gen, const GammaTensor& gamma, const std::vector<double>& chi,
                             const QualityOptions& opt)
{
    const auto& I = *gen.index;
    QualityReport q;
    q.N = I.size();
    q.n = I.active_states;
    q.threshold = I.threshold.value_or(std::numeric_limits<double>::infinity());
    const auto ev = smallest_eigenvalues(gen, opt.dense_crossover, 4);
    q.nu_c = ev.values.size() ? std::abs(ev.values(0)) : 0.0;
    q.lambda2 = ev.values.size() > 1 ? std::abs(ev.values(1)) : std::numeric_limits<double>::infinity();
    q.nu_t = trace_number(gen);
    for (double E : opt.partial_thresholds) q.nu_t_partial.emplace_back(E, partial_trace_number(gen, chi, E));
    q.nu_h = hermiticity_number(gen);
    if (opt.positivity) {
        const auto p = positivity_metrics(gamma, gen);
        q.nu_m = p.nu_m;
        q.nu_mt = p.nu_mt;
        q.nu_tc = p.nu_tc;
    }
    if (opt.nu_p) {
        double t = opt.nu_p_time;
        if (t <= 0.0) t = 1.0 / std::max(gen.K.norm(), 1e-300);
        q.nu_p_time = t;
        q.nu_p = positivity_number(gen, t, opt.nu_p_cap, opt.nu_p_starts, opt.nu_p_seed);
    }
    return q;
}

DissipativityCheck dissipativity(const Generator& gen, double delta)
{
    DissipativityCheck c;
    const Eigen::VectorXcd w = dense_eigenvalues(to_dense(gen.K));
    c.min_abs = std::numeric_limits<double>::infinity();
    for (int k = 0; k < w.size(); ++k) {
        c.min_abs = std::min(c.min_abs, std::abs(w(k)));
        if (std::abs(w(k)) <= delta) ++c.near_zero;
        else c.max_real_other = std::max(c.max_real_other, w(k).real());
    }
    return c;
}

} // namespace ermea
