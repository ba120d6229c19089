// index_set.cpp: Cost function, chi ordering, secular clusters and compound index sets

#include "ermea/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ermea/errors.hpp"

namespace ermea {

std::string to_string(Variant v)
{
    switch (v) {
    case Variant::CRB: return "CRB";
    case Variant::PERLind: return "PERLind";
    case Variant::DL: return "DL";
    }
    return "?";
}

Variant parse_variant(const std::string& name)
{
    std::string u;
    for (char c : name) u += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (u == "CRB") return Variant::CRB;
    if (u == "PERLIND") return Variant::PERLind;
    if (u == "DL") return Variant::DL;
    throw ValidationError("unknown variant '" + name + "' (expected CRB, PERLind or DL)");
}

double mu_bar(const std::vector<LeadSpec>& leads)
{
    double num = 0.0, den = 0.0;
    for (const auto& l : leads) {
        num += l.weight() * l.mu;
        den += l.weight();
    }
    return den > 0.0 ? num / den : 0.0;
}

std::vector<double> cost_function(const Spectrum& spectrum, double mu_bar)
{
    std::vector<double> chi(spectrum.size());
    for (int a = 0; a < spectrum.size(); ++a) chi[a] = spectrum.E[a] - mu_bar * spectrum.N[a];
    return chi;
}

ChiOrder chi_order(const Spectrum& spectrum, const std::vector<double>& chi, double tie_tol)
{
    ChiOrder o;
    const int n = spectrum.size();
    o.order.resize(n);
    std::iota(o.order.begin(), o.order.end(), 0);
    std::stable_sort(o.order.begin(), o.order.end(), [&](int a, int b) { return chi[a] < chi[b]; });

    auto by_sector = [&](int a, int b) {
        if (spectrum.sector_of[a] != spectrum.sector_of[b]) return spectrum.sector_of[a] < spectrum.sector_of[b];
        return spectrum.local_of[a] < spectrum.local_of[b];
    };
    int start = 0;
    for (int k = 1; k <= n; ++k) {
        if (k == n || chi[o.order[k]] - chi[o.order[k - 1]] > tie_tol) {
            std::sort(o.order.begin() + start, o.order.begin() + k, by_sector);
            o.level_start.push_back(start);
            o.level_chi.push_back(chi[o.order[start]]);
            for (int j = start; j < k; ++j) o.level_chi.back() = std::min(o.level_chi.back(), chi[o.order[j]]);
            start = k;
        }
    }
    o.level_start.push_back(n);
    o.rank.resize(n);
    for (int k = 0; k < n; ++k) o.rank[o.order[k]] = k;
    return o;
}

std::vector<int> secular_clusters(const Spectrum& spectrum, std::optional<double> delta_E)
{
    std::vector<int> cluster(spectrum.size(), -1);
    int next = 0;
    for (int k = 0; k < spectrum.sectors(); ++k) {
        const int off = spectrum.offsets[k];
        const int d = spectrum.sector_size(k);
        if (!delta_E) {
            for (int a = 0; a < d; ++a) cluster[off + a] = next;
            ++next;
            continue;
        }
        const double gap = std::max(*delta_E, kDegeneracyTol);
        // energies are ascending within a sector
        for (int a = 0; a < d; ++a) {
            if (a > 0 && spectrum.E[off + a] - spectrum.E[off + a - 1] > gap) ++next;
            cluster[off + a] = next;
        }
        ++next;
    }
    return cluster;
}

std::size_t count_pairs(const Spectrum& spectrum, std::optional<double> delta_E)
{
    const auto cl = secular_clusters(spectrum, delta_E);
    std::vector<std::size_t> size(cl.empty() ? 0 : *std::max_element(cl.begin(), cl.end()) + 1, 0);
    for (int c : cl) ++size[c];
    std::size_t total = 0;
    for (auto s : size) total += s * s;
    return total;
}

Eigen::MatrixXd ChannelOperators::matrix(int row_sector, int col_sector) const
{
    const int bf = by_from[col_sector];
    if (bf >= 0 && blocks[bf].to == row_sector) return blocks[bf].m;
    const int br = by_from[row_sector];
    if (br >= 0 && blocks[br].to == col_sector) return blocks[br].m.transpose();
    return {};
}

Model build_model(const SystemSpec& spec, const std::vector<LeadSpec>& leads, QuadratureConfig quad)
{
    Model m;
    m.spec = spec;
    m.basis = build_basis(spec);
    m.spectrum = diagonalize(m.basis, build_hamiltonian(spec, m.basis));
    m.jumps = jump_operators(m.basis, m.spectrum);
    return recouple(m, leads, quad);
}

Model recouple(const Model& base, const std::vector<LeadSpec>& leads, QuadratureConfig quad)
{
    Model m;
    m.spec = base.spec;
    m.basis = base.basis;
    m.spectrum = base.spectrum;
    m.jumps = base.jumps;
    m.kernel = std::make_shared<BathKernel>(leads, m.spec.sites, m.spec.spinful, quad);
    for (const auto& ch : m.kernel->channels()) {
        ChannelOperators op;
        op.lead = ch.lead;
        op.by_from.assign(m.spectrum.sectors(), -1);
        op.by_to.assign(m.spectrum.sectors(), -1);
        for (int mu = 0; mu < m.jumps.orbitals; ++mu) {
            if (ch.coupling(mu) == 0.0) continue;
            for (const auto& jb : m.jumps.annihilation[mu]) {
                int idx = op.by_from[jb.from];
                if (idx < 0) {
                    idx = static_cast<int>(op.blocks.size());
                    op.blocks.push_back({jb.from, jb.to, Eigen::MatrixXd::Zero(jb.m.rows(), jb.m.cols())});
                    op.by_from[jb.from] = idx;
                    op.by_to[jb.to] = idx;
                } else if (op.blocks[idx].to != jb.to) {
                    throw ValidationError("channel couples one sector to two targets");
                }
                op.blocks[idx].m += ch.coupling(mu) * jb.m;
            }
        }
        m.channels.push_back(std::move(op));
    }
    m.mu_bar = mu_bar(m.kernel->leads());
    m.chi = cost_function(m.spectrum, m.mu_bar);
    m.order = chi_order(m.spectrum, m.chi);
    return m;
}

int IndexSet::find(int a, int b) const
{
    if (a < 0 || b < 0 || a >= static_cast<int>(block_of.size()) || b >= static_cast<int>(block_of.size()))
        return -1;
    const int B = block_of[a];
    if (B < 0 || block_of[b] != B) return -1;
    return block_pos[B](slot_of[a], slot_of[b]);
}

IndexSet build_index_set_levels(const Spectrum& spectrum, const ChiOrder& order,
                                std::optional<double> delta_E, int levels, double E2_absolute, double mu_bar)
{
    if (levels <= 0) throw ValidationError("index set: threshold lies below every eigenstate");
    levels = std::min(levels, order.levels());
    const int n = spectrum.size();
    const int active = order.level_start[levels];

    IndexSet I;
    I.delta_E = delta_E;
    I.threshold = levels < order.levels() ? order.level_chi[levels] : std::numeric_limits<double>::infinity();
    I.intermediate_cut = std::max(E2_absolute, *I.threshold);
    I.mu_bar = mu_bar;
    I.active_states = active;
    I.block_of.assign(n, -1);
    I.slot_of.assign(n, -1);
    I.sector_blocks.resize(spectrum.sectors());

    const auto cluster = secular_clusters(spectrum, delta_E);
    std::vector<int> block_of_cluster(*std::max_element(cluster.begin(), cluster.end()) + 1, -1);

    for (int r = 0; r < active; ++r) {
        const int x = order.order[r];
        int& B = block_of_cluster[cluster[x]];
        if (B < 0) {
            B = static_cast<int>(I.blocks.size());
            I.blocks.emplace_back();
            I.block_sector.push_back(spectrum.sector_of[x]);
            I.sector_blocks[spectrum.sector_of[x]].push_back(B);
        }
        I.block_of[x] = B;
        I.slot_of[x] = static_cast<int>(I.blocks[B].size());
        I.blocks[B].push_back(x);
    }
    for (const auto& members : I.blocks) {
        const auto m = static_cast<Eigen::Index>(members.size());
        I.block_pos.push_back(Eigen::MatrixXi::Constant(m, m, -1));
    }

    // pairs ordered by (max rank, rank a, rank b): the set for fewer levels is a prefix
    for (int r = 0; r < active; ++r) {
        const int x = order.order[r];
        const int B = I.block_of[x];
        const int sx = I.slot_of[x];
        auto& pos = I.block_pos[B];
        for (int sy = 0; sy < sx; ++sy) {
            pos(sy, sx) = I.size();
            I.pairs.emplace_back(I.blocks[B][sy], x);
        }
        for (int sy = 0; sy < sx; ++sy) {
            pos(sx, sy) = I.size();
            I.pairs.emplace_back(x, I.blocks[B][sy]);
        }
        pos(sx, sx) = I.size();
        I.diagonal.push_back(I.size());
        I.pairs.emplace_back(x, x);
    }
    return I;
}

IndexSet build_index_set(const Spectrum& spectrum, std::optional<double> delta_E, std::optional<double> threshold,
                         double mu_bar, std::optional<double> E2_offset)
{
    const auto chi = cost_function(spectrum, mu_bar);
    const auto order = chi_order(spectrum, chi);
    int levels = order.levels();
    if (threshold) {
        levels = 0;
        while (levels < order.levels() && order.level_chi[levels] < *threshold) ++levels;
    }
    const double E2 = chi[order.order.front()] + E2_offset.value_or(80.0);
    IndexSet I = build_index_set_levels(spectrum, order, delta_E, levels, E2, mu_bar);
    if (threshold) I.threshold = threshold;
    I.intermediate_cut = std::max(E2, I.threshold.value_or(std::numeric_limits<double>::infinity()));
    return I;
}

} // namespace ermea
