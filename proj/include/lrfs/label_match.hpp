#pragma once

#include <Eigen/Dense>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "lrfs/assignment.hpp"
#include "lrfs/divergence.hpp"
#include "lrfs/label.hpp"
#include "lrfs/lmb.hpp"
#include "lrfs/mdglmb.hpp"

namespace lrfs {

/// Matching cost matrix in the (|L1|+1) x (|L2|+1) form: real-to-real
/// entries hold the PDF divergence, the extra row/column holds the
/// unassignment threshold T_D, and the corner is the infinity sentinel.
template <typename Scalar = double>
struct CostMatrix {
    Eigen::MatrixX<Scalar> entries;
    Scalar threshold = Scalar(0);

    [[nodiscard]] Eigen::Index rows1() const { return entries.rows() - 1; }
    [[nodiscard]] Eigen::Index cols2() const { return entries.cols() - 1; }
};

/// Costs depend on track PDFs only, never on existence probabilities; an
/// infinite divergence forces unassignment.
template <typename Scalar>
CostMatrix<Scalar> build_cost_matrix(const LmbDensity<Scalar>& lmb1,
                                     const LmbDensity<Scalar>& lmb2,
                                     DivergenceKind kind, Scalar threshold) {
    if (!(threshold > Scalar(0)))
        throw std::invalid_argument("build_cost_matrix: threshold must be positive");
    const Eigen::Index n1 = static_cast<Eigen::Index>(lmb1.tracks.size());
    const Eigen::Index n2 = static_cast<Eigen::Index>(lmb2.tracks.size());
    CostMatrix<Scalar> cost;
    cost.threshold = threshold;
    cost.entries.resize(n1 + 1, n2 + 1);
    cost.entries.setConstant(threshold);
    for (Eigen::Index i = 0; i < n1; ++i)
        for (Eigen::Index j = 0; j < n2; ++j) {
            Scalar d = pdf_divergence(kind, lmb1.tracks[i].pdf, lmb2.tracks[j].pdf);
            cost.entries(i, j) = std::isfinite(d) ? d : infinite_cost<Scalar>();
        }
    cost.entries(n1, n2) = infinite_cost<Scalar>();
    return cost;
}

/// Outcome of the modified rank assignment: matched index pairs plus the
/// labels of each side left unassigned.
struct MatchAssignment {
    std::vector<std::pair<int, int>> matched;  // (index into side 1, index into side 2)
    std::vector<int> unmatched1;
    std::vector<int> unmatched2;
    double total_cost = 0.0;
};

/// Solve the rank assignment by expanding to an (n1+n2) square problem:
/// every real label may match a real label or pay T_D to stay unassigned,
/// and the corner cell can never be selected.
template <typename Scalar>
MatchAssignment solve_assignment(const CostMatrix<Scalar>& cost) {
    const int n1 = static_cast<int>(cost.rows1());
    const int n2 = static_cast<int>(cost.cols2());
    MatchAssignment out;
    if (n1 + n2 == 0) return out;

    const Scalar kInf = infinite_cost<Scalar>();
    Eigen::MatrixX<Scalar> square(n1 + n2, n1 + n2);
    square.setConstant(kInf);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) square(i, j) = cost.entries(i, j);
    for (int i = 0; i < n1; ++i) square(i, n2 + i) = cost.entries(i, n2);
    for (int j = 0; j < n2; ++j) square(n1 + j, j) = cost.entries(n1, j);
    square.bottomRightCorner(n2, n1).setZero();

    LapResult<Scalar> lap = solve_lap(square);
    if (!lap.feasible) throw std::logic_error("solve_assignment: infeasible");
    out.total_cost = static_cast<double>(lap.total);
    for (int i = 0; i < n1; ++i) {
        const int j = lap.row_to_col[i];
        if (j < n2)
            out.matched.emplace_back(i, j);
        else
            out.unmatched1.push_back(i);
    }
    for (int j = 0; j < n2; ++j) {
        bool taken = false;
        for (const auto& [a, b] : out.matched) taken = taken || b == j;
        if (!taken) out.unmatched2.push_back(j);
    }
    return out;
}

/// Canonical-id table: each id maps to the (agent, raw label) pairs it
/// unifies.
struct LabelMap {
    std::map<int, std::vector<std::pair<int, Label>>> entries;
};

/// Match every agent's labels against a running canonical table seeded by
/// the reference agent; matched labels are rewritten to the canonical
/// representative, unmatched ones get fresh canonical ids. Returns the
/// relabeled densities together with the id table.
template <typename Scalar>
std::pair<std::vector<LmbDensity<Scalar>>, LabelMap> canonicalize(
    const std::vector<LmbDensity<Scalar>>& densities, std::size_t reference,
    DivergenceKind kind, Scalar threshold) {
    if (densities.empty()) throw std::invalid_argument("canonicalize: no densities");
    if (reference >= densities.size())
        throw std::invalid_argument("canonicalize: bad reference index");

    struct TableEntry {
        Label representative;        // carries the canonical id
        BernoulliTrack<Scalar> pdf;  // representative track used for costs
    };
    std::vector<TableEntry> table;
    LabelMap map;
    int next_id = 0;

    auto fresh_entry = [&](const BernoulliTrack<Scalar>& t, int agent) -> const Label& {
        TableEntry e;
        e.representative = t.label;
        e.representative.canonical_id = next_id;
        e.pdf = t;
        map.entries[next_id].emplace_back(agent, t.label);
        ++next_id;
        table.push_back(std::move(e));
        return table.back().representative;
    };

    std::vector<LmbDensity<Scalar>> out(densities.size());

    std::vector<std::size_t> order;
    order.push_back(reference);
    for (std::size_t i = 0; i < densities.size(); ++i)
        if (i != reference) order.push_back(i);

    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const std::size_t agent = order[pos];
        const LmbDensity<Scalar>& in = densities[agent];
        std::map<Label, Label> relabel;

        if (pos == 0) {
            for (const auto& t : in.tracks)
                relabel[t.label] = fresh_entry(t, static_cast<int>(agent));
        } else {
            LmbDensity<Scalar> table_density;
            for (const auto& e : table) {
                BernoulliTrack<Scalar> t = e.pdf;
                t.label = e.representative;
                table_density.add_track(std::move(t));
            }
            CostMatrix<Scalar> cost =
                build_cost_matrix(table_density, in, kind, threshold);
            MatchAssignment match = solve_assignment(cost);
            for (const auto& [ti, j] : match.matched) {
                const Label& canonical = table_density.tracks[ti].label;
                relabel[in.tracks[j].label] = canonical;
                map.entries[canonical.canonical_id].emplace_back(static_cast<int>(agent),
                                                                 in.tracks[j].label);
            }
            for (int j : match.unmatched2)
                relabel[in.tracks[j].label] =
                    fresh_entry(in.tracks[j], static_cast<int>(agent));
        }

        LmbDensity<Scalar>& dst = out[agent];
        for (const auto& t : in.tracks) {
            BernoulliTrack<Scalar> copy = t;
            copy.label = relabel.at(t.label);
            dst.add_track(std::move(copy));
        }
        // labels in the space without tracks keep their raw identity
        for (const Label& l : in.label_space)
            if (!in.find(l) && !contains(dst.label_space, l))
                dst.label_space = set_union(dst.label_space, {l});
    }
    return {std::move(out), std::move(map)};
}

/// Canonicalize hypothesis-table densities by matching their first-moment
/// LMB collapses, then relabeling the originals.
template <typename Scalar>
std::pair<std::vector<MdglmbDensity<Scalar>>, LabelMap> canonicalize(
    const std::vector<MdglmbDensity<Scalar>>& densities, std::size_t reference,
    DivergenceKind kind, Scalar threshold) {
    std::vector<LmbDensity<Scalar>> collapsed;
    collapsed.reserve(densities.size());
    for (const auto& d : densities) collapsed.push_back(mdglmb_to_lmb(d));

    auto [matched, map] = canonicalize(collapsed, reference, kind, threshold);

    // reconstruct the per-agent relabeling from the id table
    std::vector<std::map<Label, Label>> relabel(densities.size());
    for (const auto& [id, sources] : map.entries)
        for (const auto& [agent, raw] : sources)
            for (const auto& t : matched[agent].tracks)
                if (t.label.canonical_id == id) relabel[agent][raw] = t.label;

    std::vector<MdglmbDensity<Scalar>> out;
    out.reserve(densities.size());
    for (std::size_t a = 0; a < densities.size(); ++a) {
        MdglmbDensity<Scalar> d;
        for (const auto& h : densities[a].hypotheses) {
            Hypothesis<Scalar> hh;
            hh.jep = h.jep;
            for (const Label& l : h.labels) {
                auto it = relabel[a].find(l);
                const Label nl = it == relabel[a].end() ? l : it->second;
                hh.labels.push_back(nl);
                auto pit = h.pdfs.find(l);
                if (pit != h.pdfs.end()) hh.pdfs[nl] = pit->second;
            }
            hh.labels = make_label_set(std::move(hh.labels));
            d.hypotheses.push_back(std::move(hh));
        }
        for (const Label& l : densities[a].label_space) {
            auto it = relabel[a].find(l);
            d.label_space.push_back(it == relabel[a].end() ? l : it->second);
        }
        d.label_space = make_label_set(std::move(d.label_space));
        d.sort_hypotheses();
        out.push_back(std::move(d));
    }
    return {std::move(out), std::move(map)};
}

}  // namespace lrfs
