// generators.cpp: Gamma tensors, Lamb shift, generator assembly and Choi transform

#include "ermea/generators.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <tuple>

#include "ermea/errors.hpp"

namespace ermea {

namespace {

constexpr double kDropTol = 1e-14;

double mean_weight(Variant v, double o1, double o2)
{
    return v == Variant::PERLind ? std::sqrt(o1 * o2) : 0.5 * (o1 + o2);
}

// (row sector, column sector, s) triples connected by a channel, with <row|B^{-s}|col>.
struct SectorLink {
    int row;
    int col;
    int s;
    Eigen::MatrixXd v;
};

std::vector<SectorLink> links_of(const ChannelOperators& ch)
{
    std::vector<SectorLink> out;
    for (const auto& b : ch.blocks) {
        out.push_back({b.to, b.from, +1, b.m});               // <a|B|b>, N_b = N_a + 1
        out.push_back({b.from, b.to, -1, b.m.transpose()});   // <a|B^dagger|b>, N_b = N_a - 1
    }
    return out;
}

std::vector<int> intermediate_states(const Model& model, int sector, double cut)
{
    std::vector<int> loc;
    const int off = model.spectrum.offsets[sector];
    for (int a = 0; a < model.spectrum.sector_size(sector); ++a)
        if (model.chi[off + a] < cut) loc.push_back(a);
    return loc;
}

GammaTensor build_gamma_impl(Variant variant, const Model& model, const IndexSet& I)
{
    const auto& sp = model.spectrum;
    GammaTensor G;
    G.variant = variant;
    G.leads = model.leads();
    G.trace13.resize(G.leads);
    for (auto& per_s : G.trace13)
        for (auto& vec : per_s) {
            vec.resize(I.blocks.size());
            for (std::size_t B = 0; B < I.blocks.size(); ++B) {
                const auto q = static_cast<Eigen::Index>(I.blocks[B].size());
                vec[B] = Eigen::MatrixXd::Zero(q, q);
            }
        }

    std::map<std::tuple<int, int, int>, int> where; // (lead, P, Q) -> block
    for (const auto& ch : model.channels) {
        const int lead = ch.lead;
        for (const auto& link : links_of(ch)) {
            const int Sp = link.row, Sq = link.col, s = link.s;
            const int op = sp.offsets[Sp], oq = sp.offsets[Sq];

            // jump-pair blocks between active blocks
            for (int P : I.sector_blocks[Sp]) {
                const auto& mp = I.blocks[P];
                for (int Q : I.sector_blocks[Sq]) {
                    const auto& mq = I.blocks[Q];
                    const int np = static_cast<int>(mp.size()), nq = static_cast<int>(mq.size());
                    Eigen::VectorXd u(np * nq), o(np * nq);
                    for (int ia = 0; ia < np; ++ia)
                        for (int ib = 0; ib < nq; ++ib) {
                            const int a = mp[ia], b = mq[ib];
                            u(ia * nq + ib) = link.v(a - op, b - oq);
                            o(ia * nq + ib) = model.kernel->occupation(lead, s, sp.E[b] - sp.E[a]);
                        }
                    if (u.cwiseAbs().maxCoeff() == 0.0) continue;
                    const int m = np * nq;
                    Eigen::MatrixXd g(m, m);
                    for (int k = 0; k < m; ++k)
                        for (int l = 0; l < m; ++l) {
                            const double x = u(k) * u(l) * mean_weight(variant, o(k), o(l));
                            g(k, l) = std::abs(x) < kDropTol ? 0.0 : x;
                        }
                    auto key = std::make_tuple(lead, P, Q);
                    auto it = where.find(key);
                    if (it == where.end()) {
                        where.emplace(key, static_cast<int>(G.blocks.size()));
                        G.blocks.push_back({lead, s, P, Q, std::move(g)});
                    } else {
                        G.blocks[it->second].g += g;
                    }
                }
            }

            // sum over intermediate a (any state below the cut) of Gamma_{ab|ad}
            const auto inter = intermediate_states(model, Sp, I.intermediate_cut);
            if (inter.empty()) continue;
            for (int Q : I.sector_blocks[Sq]) {
                const auto& mq = I.blocks[Q];
                const auto ni = static_cast<Eigen::Index>(inter.size());
                const auto nq = static_cast<Eigen::Index>(mq.size());
                Eigen::MatrixXd X(ni, nq), O(ni, nq);
                for (Eigen::Index r = 0; r < ni; ++r)
                    for (Eigen::Index c = 0; c < nq; ++c) {
                        const int a = op + inter[r], b = mq[c];
                        X(r, c) = link.v(inter[r], b - oq);
                        O(r, c) = X(r, c) == 0.0 ? 0.0 : model.kernel->occupation(lead, s, sp.E[b] - sp.E[a]);
                    }
                Eigen::MatrixXd M;
                if (variant == Variant::PERLind) {
                    const Eigen::MatrixXd R = X.cwiseProduct(O.cwiseSqrt());
                    M = R.transpose() * R;
                } else {
                    const Eigen::MatrixXd Z = X.cwiseProduct(O);
                    M = 0.5 * (X.transpose() * Z + Z.transpose() * X);
                }
                G.trace13[lead][s > 0 ? 1 : 0][Q] += M;
            }
        }
    }
    return G;
}

} // namespace

Eigen::MatrixXd GammaTensor::total_trace13(int block) const
{
    Eigen::MatrixXd M = trace13[0][0][block] * 0.0;
    for (const auto& per_s : trace13) M += per_s[0][block] + per_s[1][block];
    return M;
}

GammaTensor gamma_crb(const Model& model, const IndexSet& index)
{
    return build_gamma_impl(Variant::CRB, model, index);
}

GammaTensor gamma_perlind(const Model& model, const IndexSet& index)
{
    return build_gamma_impl(Variant::PERLind, model, index);
}

GammaTensor gamma_dl(const Model& model, const IndexSet& index)
{
    if (!index.secular())
        throw ValidationError("DL generator requires the secular index set (delta_E = 0)");
    // on equal-energy blocks the arithmetic mean is O(E_ba) itself
    return build_gamma_impl(Variant::DL, model, index);
}

GammaTensor build_gamma(Variant v, const Model& model, const IndexSet& index)
{
    switch (v) {
    case Variant::CRB: return gamma_crb(model, index);
    case Variant::PERLind: return gamma_perlind(model, index);
    case Variant::DL: return gamma_dl(model, index);
    }
    throw ValidationError("unknown variant");
}

double gamma_entry(Variant v, const Model& model, int lead, int a, int b, int c, int d)
{
    const auto& sp = model.spectrum;
    const int s = sp.N[b] - sp.N[a];
    if (std::abs(s) != 1 || sp.N[d] - sp.N[c] != s) return 0.0;
    if (v == Variant::DL
        && (std::abs(sp.E[a] - sp.E[c]) > kDegeneracyTol || std::abs(sp.E[b] - sp.E[d]) > kDegeneracyTol))
        return 0.0;
    const double oab = model.kernel->occupation(lead, s, sp.E[b] - sp.E[a]);
    const double ocd = model.kernel->occupation(lead, s, sp.E[d] - sp.E[c]);
    double total = 0.0;
    for (const auto& ch : model.channels) {
        if (ch.lead != lead) continue;
        const Eigen::MatrixXd X1 = ch.matrix(sp.sector_of[a], sp.sector_of[b]);
        const Eigen::MatrixXd X2 = ch.matrix(sp.sector_of[c], sp.sector_of[d]);
        if (X1.size() == 0 || X2.size() == 0) continue;
        total += X1(sp.local_of[a], sp.local_of[b]) * X2(sp.local_of[c], sp.local_of[d])
                 * mean_weight(v, oab, ocd);
    }
    return total;
}

LambShift lamb_shift(const Model& model, double cut, const IndexSet* restrict_to)
{
    const auto& sp = model.spectrum;
    LambShift L;
    for (int k = 0; k < sp.sectors(); ++k) L.sectors.push_back(Eigen::MatrixXd::Zero(sp.sector_size(k), sp.sector_size(k)));

    for (int Sa = 0; Sa < sp.sectors(); ++Sa) {
        // row groups: pairs are only formed inside a group
        std::vector<std::vector<int>> groups;
        if (restrict_to) {
            for (int B : restrict_to->sector_blocks[Sa]) {
                std::vector<int> g;
                for (int x : restrict_to->blocks[B]) g.push_back(x - sp.offsets[Sa]);
                groups.push_back(std::move(g));
            }
        } else {
            std::vector<int> g(sp.sector_size(Sa));
            for (int a = 0; a < sp.sector_size(Sa); ++a) g[a] = a;
            groups.push_back(std::move(g));
        }
        if (groups.empty()) continue;

        for (const auto& ch : model.channels) {
            for (const auto& link : links_of(ch)) {
                if (link.row != Sa) continue;
                const int Se = link.col;
                // D^s = sum V c^s with s = N_a - N_e
                const int s = sp.N[sp.offsets[Sa]] - sp.N[sp.offsets[Se]];
                const auto inter = intermediate_states(model, Se, cut);
                if (inter.empty()) continue;
                const auto ne = static_cast<Eigen::Index>(inter.size());
                for (const auto& g : groups) {
                    const auto ng = static_cast<Eigen::Index>(g.size());
                    Eigen::MatrixXd Y(ng, ne), U(ng, ne);
                    for (Eigen::Index r = 0; r < ng; ++r)
                        for (Eigen::Index c = 0; c < ne; ++c) {
                            Y(r, c) = link.v(g[r], inter[c]);
                            const double w = sp.E[sp.offsets[Sa] + g[r]] - sp.E[sp.offsets[Se] + inter[c]];
                            U(r, c) = Y(r, c) == 0.0 ? 0.0 : Y(r, c) * model.kernel->principal_value(ch.lead, s, w);
                        }
                    const Eigen::MatrixXd H = (U * Y.transpose() + Y * U.transpose()) / (4.0 * std::numbers::pi);
                    for (Eigen::Index r = 0; r < ng; ++r)
                        for (Eigen::Index c = 0; c < ng; ++c) L.sectors[Sa](g[r], g[c]) += H(r, c);
                }
            }
        }
    }
    return L;
}

Generator assemble_generator(const Model& model, const LambShift& lamb, const GammaTensor& gamma,
                             const IndexSet& I)
{
    const auto& sp = model.spectrum;
    if (static_cast<int>(I.block_of.size()) != sp.size() || lamb.sectors.size() != static_cast<std::size_t>(sp.sectors()))
        throw ValidationError("generator inputs do not share one spectrum");
    if (gamma.trace13.empty() || gamma.trace13[0][0].size() != I.blocks.size())
        throw ValidationError("Gamma tensor was built on a different index set");

    const cplx iu(0.0, 1.0);
    std::vector<Eigen::Triplet<cplx>> trips;

    // -i[H, sigma] - 1/2 {M, sigma} as A sigma + sigma A^dagger with A = -iH - M/2
    for (std::size_t B = 0; B < I.blocks.size(); ++B) {
        const auto& mem = I.blocks[B];
        const int n = static_cast<int>(mem.size());
        const int S = I.block_sector[B];
        const int off = sp.offsets[S];
        const Eigen::MatrixXd M = gamma.total_trace13(static_cast<int>(B));
        Eigen::MatrixXcd A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double h = lamb.sectors[S](mem[i] - off, mem[j] - off);
                if (i == j) h += sp.E[mem[i]];
                A(i, j) = -iu * h - 0.5 * M(i, j);
            }
        const auto& pos = I.block_pos[B];
        for (int ia = 0; ia < n; ++ia)
            for (int ic = 0; ic < n; ++ic) {
                const int row = pos(ia, ic);
                for (int ie = 0; ie < n; ++ie) {
                    if (A(ia, ie) != 0.0) trips.emplace_back(row, pos(ie, ic), A(ia, ie));
                    if (A(ic, ie) != 0.0) trips.emplace_back(row, pos(ia, ie), std::conj(A(ic, ie)));
                }
            }
    }

    // jump term: d sigma_ac += Gamma_{ab|cd} sigma_bd
    std::map<std::pair<int, int>, Eigen::MatrixXd> jump;
    for (const auto& gb : gamma.blocks) {
        auto key = std::make_pair(gb.P, gb.Q);
        auto it = jump.find(key);
        if (it == jump.end()) jump.emplace(key, gb.g);
        else it->second += gb.g;
    }
    for (const auto& [key, g] : jump) {
        const auto& mp = I.blocks[key.first];
        const auto& mq = I.blocks[key.second];
        const int np = static_cast<int>(mp.size()), nq = static_cast<int>(mq.size());
        const auto& pp = I.block_pos[key.first];
        const auto& pq = I.block_pos[key.second];
        for (int ia = 0; ia < np; ++ia)
            for (int ib = 0; ib < nq; ++ib)
                for (int ic = 0; ic < np; ++ic)
                    for (int id = 0; id < nq; ++id) {
                        const double x = g(ia * nq + ib, ic * nq + id);
                        if (x != 0.0) trips.emplace_back(pp(ia, ic), pq(ib, id), cplx(x, 0.0));
                    }
    }

    Generator gen;
    gen.variant = gamma.variant;
    gen.index = &I;
    gen.K.resize(I.size(), I.size());
    gen.K.setFromTriplets(trips.begin(), trips.end());
    gen.K.makeCompressed();
    return gen;
}

BuiltGenerator build_generator(Variant v, const Model& model, IndexSet index, bool with_lamb)
{
    BuiltGenerator out;
    out.index = std::make_shared<IndexSet>(std::move(index));
    out.gamma = build_gamma(v, model, *out.index);
    if (with_lamb) {
        out.lamb = lamb_shift(model, out.index->intermediate_cut, out.index.get());
    } else {
        for (int k = 0; k < model.spectrum.sectors(); ++k)
            out.lamb.sectors.push_back(
                Eigen::MatrixXd::Zero(model.spectrum.sector_size(k), model.spectrum.sector_size(k)));
    }
    out.gen = assemble_generator(model, out.lamb, out.gamma, *out.index);
    return out;
}

Eigen::MatrixXcd choi_transform(const Eigen::MatrixXcd& M, int n)
{
    const long n2 = long(n) * n;
    if (M.rows() != n2 || M.cols() != n2) throw ValidationError("choi_transform: expected n^2 x n^2 matrix");
    Eigen::MatrixXcd C(n2, n2);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d)
                    C(vec_index(a, b, n), vec_index(c, d, n)) = M(vec_index(a, c, n), vec_index(b, d, n));
    return C;
}

SpMat choi_transform(const Generator& gen, int n)
{
    const auto& I = *gen.index;
    std::vector<Eigen::Triplet<cplx>> trips;
    for (int j = 0; j < gen.K.outerSize(); ++j)
        for (SpMat::InnerIterator it(gen.K, j); it; ++it) {
            const auto [a, c] = I.pairs[it.row()];
            const auto [b, d] = I.pairs[it.col()];
            trips.emplace_back(vec_index(a, b, n), vec_index(c, d, n), it.value());
        }
    const long n2 = long(n) * n;
    SpMat C(n2, n2);
    C.setFromTriplets(trips.begin(), trips.end());
    return C;
}

Eigen::MatrixXcd dense_superoperator(const Generator& gen, int n)
{
    const auto& I = *gen.index;
    const long n2 = long(n) * n;
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(n2, n2);
    for (int j = 0; j < gen.K.outerSize(); ++j)
        for (SpMat::InnerIterator it(gen.K, j); it; ++it) {
            const auto [a, c] = I.pairs[it.row()];
            const auto [b, d] = I.pairs[it.col()];
            D(vec_index(a, c, n), vec_index(b, d, n)) += it.value();
        }
    return D;
}

void dump_generator(const Generator& gen, const std::string& matrix_path, const std::string& manifest_path)
{
    std::ofstream m(matrix_path);
    if (!m) throw std::runtime_error("cannot write " + matrix_path);
    m << "row,col,re,im\n" << std::setprecision(15);
    for (int j = 0; j < gen.K.outerSize(); ++j)
        for (SpMat::InnerIterator it(gen.K, j); it; ++it)
            m << it.row() << ',' << it.col() << ',' << it.value().real() << ',' << it.value().imag() << '\n';

    std::ofstream f(manifest_path);
    if (!f) throw std::runtime_error("cannot write " + manifest_path);
    const int n = static_cast<int>(gen.index->block_of.size());
    f << "position,a,b,vec_index\n";
    for (int i = 0; i < gen.index->size(); ++i) {
        const auto [a, b] = gen.index->pairs[i];
        f << i << ',' << a << ',' << b << ',' << vec_index(a, b, n) << '\n';
    }
}

} // namespace ermea
