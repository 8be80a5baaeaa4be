#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "lrfs/fusion.hpp"
#include "lrfs/general_lrfs.hpp"
#include "lrfs/label.hpp"
#include "lrfs/lmb.hpp"
#include "lrfs/mdglmb.hpp"

namespace lrfs {

/// Disjoint label subspaces covering the global label space, with the agents
/// whose label space (or field of view) covers each subspace.
struct SubspacePartition {
    std::vector<LabelSet> subspaces;
    std::vector<std::vector<int>> membership;  // agent indices per subspace

    [[nodiscard]] int subspace_of(const Label& l) const {
        for (std::size_t m = 0; m < subspaces.size(); ++m)
            if (contains(subspaces[m], l)) return static_cast<int>(m);
        return -1;
    }

    [[nodiscard]] LabelSet global_space() const {
        LabelSet all;
        for (const auto& s : subspaces) all = set_union(all, s);
        return all;
    }
};

enum class SubspaceGranularity {
    SignatureGroups,    // labels grouped by identical agent-membership signature
    SingletonPerLabel,  // one subspace per label (natural for LMB)
};

/// Build the partition by comparing which agents' label spaces contain each
/// label.
inline SubspacePartition discover_subspaces(
    const std::vector<LabelSet>& label_spaces,
    SubspaceGranularity granularity = SubspaceGranularity::SignatureGroups) {
    LabelSet all;
    for (const auto& s : label_spaces) all = set_union(all, s);

    std::map<std::vector<int>, LabelSet> groups;
    for (const Label& l : all) {
        std::vector<int> signature;
        for (std::size_t i = 0; i < label_spaces.size(); ++i)
            if (contains(label_spaces[i], l)) signature.push_back(static_cast<int>(i));
        groups[signature].push_back(l);
    }

    SubspacePartition part;
    for (auto& [signature, labels] : groups) {
        if (granularity == SubspaceGranularity::SingletonPerLabel) {
            for (const Label& l : labels) {
                part.subspaces.push_back({l});
                part.membership.push_back(signature);
            }
        } else {
            part.subspaces.push_back(make_label_set(std::move(labels)));
            part.membership.push_back(signature);
        }
    }
    return part;
}

/// Known-FoV alternative: membership comes from which sensors' regions
/// contain the track position instead of from label bookkeeping.
inline SubspacePartition discover_subspaces_geometric(
    const std::vector<LabelSet>& label_spaces,
    const std::function<Eigen::Vector2d(const Label&)>& position_of,
    const std::vector<Eigen::Vector2d>& sensor_positions,
    const std::vector<double>& fov_radius,
    SubspaceGranularity granularity = SubspaceGranularity::SingletonPerLabel) {
    LabelSet all;
    for (const auto& s : label_spaces) all = set_union(all, s);

    std::map<std::vector<int>, LabelSet> groups;
    for (const Label& l : all) {
        const Eigen::Vector2d pos = position_of(l);
        std::vector<int> signature;
        for (std::size_t i = 0; i < sensor_positions.size(); ++i)
            if ((pos - sensor_positions[i]).norm() <= fov_radius[i])
                signature.push_back(static_cast<int>(i));
        if (signature.empty()) {
            // fall back on the label-space owners so the subspace keeps an agent
            for (std::size_t i = 0; i < label_spaces.size(); ++i)
                if (contains(label_spaces[i], l)) signature.push_back(static_cast<int>(i));
        }
        groups[signature].push_back(l);
    }

    SubspacePartition part;
    for (auto& [signature, labels] : groups) {
        if (granularity == SubspaceGranularity::SingletonPerLabel) {
            for (const Label& l : labels) {
                part.subspaces.push_back({l});
                part.membership.push_back(signature);
            }
        } else {
            part.subspaces.push_back(make_label_set(std::move(labels)));
            part.membership.push_back(signature);
        }
    }
    return part;
}

/// Best factorization onto the subspaces: sub-jep sums the masses of all
/// label sets whose trace on the subspace matches, and each sub-conditional
/// is the mass-weighted blend of the restricted conditionals. A subspace
/// disjoint from the density's labels yields "empty set with probability 1".
template <typename Scalar>
std::vector<MdglmbDensity<Scalar>> decompose(const MdglmbDensity<Scalar>& density,
                                             const SubspacePartition& partition,
                                             const GmReduceParams& reduce =
                                                 GmReduceParams::none()) {
    std::vector<MdglmbDensity<Scalar>> out;
    for (const LabelSet& subspace : partition.subspaces) {
        struct Acc {
            Scalar jep = Scalar(0);
            std::map<Label, GaussianMixture<Scalar>> mixes;
        };
        std::map<LabelSet, Acc> table;
        for (const auto& h : density.hypotheses) {
            LabelSet trace = set_intersection(h.labels, subspace);
            Acc& acc = table[trace];
            acc.jep += h.jep;
            if (h.jep <= Scalar(0)) continue;
            for (const Label& l : trace) {
                GaussianMixture<Scalar> part = h.pdfs.at(l);
                part.scale_weights(h.jep);
                auto& mix = acc.mixes[l];
                mix.components.insert(mix.components.end(), part.components.begin(),
                                      part.components.end());
            }
        }
        MdglmbDensity<Scalar> sub;
        sub.label_space = subspace;
        for (auto& [trace, acc] : table) {
            if (!(acc.jep > Scalar(0)) && !trace.empty()) continue;
            Hypothesis<Scalar> h;
            h.labels = trace;
            h.jep = acc.jep;
            if (acc.jep > Scalar(0)) {
                for (auto& [l, mix] : acc.mixes) {
                    mix.scale_weights(Scalar(1) / acc.jep);
                    h.pdfs[l] = gm_reduce(mix, reduce);
                }
            }
            sub.hypotheses.push_back(std::move(h));
        }
        sub.sort_hypotheses();
        out.push_back(std::move(sub));
    }
    return out;
}

template <typename Scalar>
std::vector<GeneralLrfs<Scalar>> decompose(const GeneralLrfs<Scalar>& density,
                                           const SubspacePartition& partition) {
    std::vector<GeneralLrfs<Scalar>> out;
    for (const LabelSet& subspace : partition.subspaces) {
        GeneralLrfs<Scalar> sub;
        sub.label_space = subspace;
        for (const auto& [set, p] : density.jep) {
            LabelSet trace = set_intersection(set, subspace);
            sub.jep[trace] += p;
        }
        for (const auto& [set, p] : density.jep) {
            if (p <= Scalar(0)) continue;
            LabelSet trace = set_intersection(set, subspace);
            if (trace.empty()) continue;
            const Scalar share = p / sub.jep[trace];
            auto it = density.cjpdf.find(set);
            if (it == density.cjpdf.end()) continue;
            JointConditional<Scalar> restricted = it->second.marginal(trace);
            for (ProductTerm<Scalar>& term : restricted.terms) {
                term.weight *= share;
                sub.cjpdf[trace].terms.push_back(std::move(term));
            }
        }
        out.push_back(std::move(sub));
    }
    return out;
}

/// Restriction of an LMB to the subspaces; exact because the tracks are
/// independent.
template <typename Scalar>
std::vector<LmbDensity<Scalar>> decompose(const LmbDensity<Scalar>& density,
                                          const SubspacePartition& partition) {
    std::vector<LmbDensity<Scalar>> out;
    for (const LabelSet& subspace : partition.subspaces) {
        LmbDensity<Scalar> sub;
        sub.label_space = subspace;
        for (const Label& l : subspace)
            if (const auto* t = density.find(l)) sub.add_track(*t);
        out.push_back(std::move(sub));
    }
    return out;
}

namespace detail {

template <typename Scalar>
FusionWeights<Scalar> renormalized_weights(const FusionWeights<Scalar>& weights,
                                           const std::vector<int>& participants) {
    Scalar total = Scalar(0);
    for (int i : participants) total += weights.w[i];
    if (!(total > Scalar(0)))
        throw std::invalid_argument("subspace has no participating weight");
    FusionWeights<Scalar> out;
    out.w.reserve(participants.size());
    for (int i : participants) out.w.push_back(weights.w[i] / total);
    return out;
}

}  // namespace detail

/// Subspace-by-subspace arithmetic-mean fusion of decomposed LMB densities;
/// the global density is the product, i.e. the union of the fused tracks.
/// Only agents covering a subspace participate in it, with weights
/// renormalized over the participants.
template <typename Scalar>
LmbDensity<Scalar> fuse_subspaces(
    const std::vector<std::vector<LmbDensity<Scalar>>>& decomposed,
    const SubspacePartition& partition, const FusionWeights<Scalar>& weights,
    const GmReduceParams& reduce = GmReduceParams{}, Scalar ep_floor = Scalar(1e-5)) {
    LmbDensity<Scalar> out;
    for (std::size_t m = 0; m < partition.subspaces.size(); ++m) {
        const auto& participants = partition.membership[m];
        FusionWeights<Scalar> local_w = detail::renormalized_weights(weights, participants);
        std::vector<LmbDensity<Scalar>> subs;
        subs.reserve(participants.size());
        for (int i : participants) subs.push_back(decomposed[i][m]);
        LmbDensity<Scalar> fused = mil_fuse_lmb(subs, local_w, reduce, ep_floor);
        out.label_space = set_union(out.label_space, partition.subspaces[m]);
        for (auto& t : fused.tracks) out.add_track(std::move(t));
    }
    return out;
}

/// Subspace-by-subspace fusion for hypothesis-table densities; the global
/// density is assembled as the capped cross-product of the per-subspace
/// hypothesis tables.
template <typename Scalar>
MdglmbDensity<Scalar> fuse_subspaces(
    const std::vector<std::vector<MdglmbDensity<Scalar>>>& decomposed,
    const SubspacePartition& partition, const FusionWeights<Scalar>& weights,
    const GmReduceParams& reduce = GmReduceParams{}, Scalar jep_floor = Scalar(1e-20),
    int max_hypotheses = 100) {
    std::vector<Hypothesis<Scalar>> product;
    product.push_back(Hypothesis<Scalar>{{}, Scalar(1), {}});
    LabelSet space;

    for (std::size_t m = 0; m < partition.subspaces.size(); ++m) {
        const auto& participants = partition.membership[m];
        FusionWeights<Scalar> local_w = detail::renormalized_weights(weights, participants);
        std::vector<MdglmbDensity<Scalar>> subs;
        subs.reserve(participants.size());
        for (int i : participants) subs.push_back(decomposed[i][m]);
        MdglmbDensity<Scalar> fused =
            mil_fuse_mdglmb(subs, local_w, reduce, jep_floor, max_hypotheses);
        space = set_union(space, partition.subspaces[m]);

        std::vector<Hypothesis<Scalar>> next;
        next.reserve(product.size() * fused.hypotheses.size());
        for (const auto& left : product) {
            for (const auto& right : fused.hypotheses) {
                Hypothesis<Scalar> h;
                h.labels = set_union(left.labels, right.labels);
                h.jep = left.jep * right.jep;
                h.pdfs = left.pdfs;
                h.pdfs.insert(right.pdfs.begin(), right.pdfs.end());
                next.push_back(std::move(h));
            }
        }
        std::sort(next.begin(), next.end(),
                  [](const auto& a, const auto& b) { return a.jep > b.jep; });
        if (static_cast<int>(next.size()) > max_hypotheses) next.resize(max_hypotheses);
        product = std::move(next);
    }

    MdglmbDensity<Scalar> out;
    out.label_space = space;
    out.hypotheses = std::move(product);
    std::erase_if(out.hypotheses, [&](const auto& h) { return h.jep < jep_floor; });
    const Scalar mass = out.jep_sum();
    if (mass > Scalar(0))
        for (auto& h : out.hypotheses) h.jep /= mass;
    out.sort_hypotheses();
    return out;
}

/// One-call path used by the tracking loop: discover, decompose, fuse.
template <typename Scalar>
LmbDensity<Scalar> mil_fuse_lmb_fov(const std::vector<LmbDensity<Scalar>>& locals,
                                    const FusionWeights<Scalar>& weights,
                                    const GmReduceParams& reduce = GmReduceParams{},
                                    Scalar ep_floor = Scalar(1e-5)) {
    std::vector<LabelSet> spaces;
    spaces.reserve(locals.size());
    for (const auto& d : locals) spaces.push_back(d.label_space);
    SubspacePartition part =
        discover_subspaces(spaces, SubspaceGranularity::SingletonPerLabel);
    std::vector<std::vector<LmbDensity<Scalar>>> decomposed;
    decomposed.reserve(locals.size());
    for (const auto& d : locals) decomposed.push_back(decompose(d, part));
    return fuse_subspaces(decomposed, part, weights, reduce, ep_floor);
}

template <typename Scalar>
MdglmbDensity<Scalar> mil_fuse_mdglmb_fov(const std::vector<MdglmbDensity<Scalar>>& locals,
                                          const FusionWeights<Scalar>& weights,
                                          const GmReduceParams& reduce = GmReduceParams{},
                                          Scalar jep_floor = Scalar(1e-20),
                                          int max_hypotheses = 100) {
    std::vector<LabelSet> spaces;
    spaces.reserve(locals.size());
    for (const auto& d : locals) spaces.push_back(d.label_space);
    SubspacePartition part =
        discover_subspaces(spaces, SubspaceGranularity::SignatureGroups);
    std::vector<std::vector<MdglmbDensity<Scalar>>> decomposed;
    decomposed.reserve(locals.size());
    for (const auto& d : locals) decomposed.push_back(decompose(d, part, reduce));
    return fuse_subspaces(decomposed, part, weights, reduce, jep_floor, max_hypotheses);
}

}  // namespace lrfs
