#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "lrfs/divergence.hpp"
#include "lrfs/gaussian.hpp"
#include "lrfs/general_lrfs.hpp"
#include "lrfs/grid.hpp"
#include "lrfs/label.hpp"
#include "lrfs/lmb.hpp"
#include "lrfs/mdglmb.hpp"

namespace lrfs {

/// Per-agent fusion weights; nonnegative, summing to one.
template <typename Scalar = double>
struct FusionWeights {
    std::vector<Scalar> w;

    static FusionWeights uniform(std::size_t n) {
        FusionWeights fw;
        fw.w.assign(n, Scalar(1) / Scalar(n));
        return fw;
    }

    void validate(std::size_t n_agents) const {
        if (w.size() != n_agents)
            throw std::invalid_argument("fusion weights: wrong agent count");
        Scalar s = Scalar(0);
        for (Scalar x : w) {
            if (x < Scalar(0)) throw std::invalid_argument("fusion weights: negative");
            s += x;
        }
        if (std::abs(s - Scalar(1)) > Scalar(1e-12))
            throw std::invalid_argument("fusion weights: must sum to 1");
    }
};

namespace detail {

template <typename Scalar, typename Density>
void require_common_label_space(const std::vector<Density>& locals) {
    for (std::size_t i = 1; i < locals.size(); ++i)
        if (locals[i].label_space != locals[0].label_space)
            throw std::invalid_argument(
                "fusion requires a common (canonicalized) label space; "
                "use the FoV-aware path for differing spaces");
}

}  // namespace detail

/// Arithmetic-mean fusion of general densities: the fused jep is the
/// weighted mean, and each joint conditional is the jep-reweighted sum of
/// the local conditionals. Label sets with zero fused mass keep no
/// conditional.
template <typename Scalar>
GeneralLrfs<Scalar> mil_fuse_general(const std::vector<GeneralLrfs<Scalar>>& locals,
                                     const FusionWeights<Scalar>& weights) {
    if (locals.empty()) throw std::invalid_argument("mil_fuse_general: no inputs");
    weights.validate(locals.size());
    detail::require_common_label_space<Scalar>(locals);

    GeneralLrfs<Scalar> out;
    out.label_space = locals[0].label_space;

    std::set<LabelSet> keys;
    for (const auto& d : locals)
        for (const auto& [set, p] : d.jep) keys.insert(set);

    for (const LabelSet& set : keys) {
        Scalar fused = Scalar(0);
        for (std::size_t i = 0; i < locals.size(); ++i)
            fused += weights.w[i] * locals[i].jep_of(set);
        out.jep[set] = fused;
        if (!(fused > Scalar(0)) || set.empty()) continue;
        JointConditional<Scalar> cond;
        for (std::size_t i = 0; i < locals.size(); ++i) {
            const Scalar share = weights.w[i] * locals[i].jep_of(set) / fused;
            if (!(share > Scalar(0))) continue;
            auto it = locals[i].cjpdf.find(set);
            if (it == locals[i].cjpdf.end())
                throw std::invalid_argument("local density misses a conditional");
            for (ProductTerm<Scalar> term : it->second.terms) {
                term.weight *= share;
                cond.terms.push_back(std::move(term));
            }
        }
        out.cjpdf[set] = std::move(cond);
    }
    return out;
}

/// Arithmetic-mean fusion within the hypothesis-per-label-set family
/// (weighted-mean jeps; per-label PDFs mixed with jep-proportional shares).
/// Hypotheses below `jep_floor` are discarded, at most `max_hypotheses`
/// survive, and the result is renormalized.
template <typename Scalar>
MdglmbDensity<Scalar> mil_fuse_mdglmb(const std::vector<MdglmbDensity<Scalar>>& locals,
                                      const FusionWeights<Scalar>& weights,
                                      const GmReduceParams& reduce = GmReduceParams{},
                                      Scalar jep_floor = Scalar(1e-20),
                                      int max_hypotheses = 100) {
    if (locals.empty()) throw std::invalid_argument("mil_fuse_mdglmb: no inputs");
    weights.validate(locals.size());
    detail::require_common_label_space<Scalar>(locals);

    std::map<LabelSet, Scalar> fused_jep;
    for (std::size_t i = 0; i < locals.size(); ++i)
        for (const auto& h : locals[i].hypotheses)
            fused_jep[h.labels] += weights.w[i] * h.jep;

    MdglmbDensity<Scalar> out;
    out.label_space = locals[0].label_space;
    for (const auto& [set, p] : fused_jep) {
        Hypothesis<Scalar> h;
        h.labels = set;
        h.jep = p;
        if (p > Scalar(0)) {
            for (const Label& l : set) {
                GaussianMixture<Scalar> mix;
                for (std::size_t i = 0; i < locals.size(); ++i) {
                    const Scalar local_jep = locals[i].jep_of(set);
                    const Scalar share = weights.w[i] * local_jep / p;
                    if (!(share > Scalar(0))) continue;
                    for (const auto& hyp : locals[i].hypotheses) {
                        if (hyp.labels != set) continue;
                        GaussianMixture<Scalar> part = hyp.pdfs.at(l);
                        part.scale_weights(share);
                        mix.components.insert(mix.components.end(), part.components.begin(),
                                              part.components.end());
                    }
                }
                h.pdfs[l] = gm_reduce(mix, reduce);
            }
        }
        out.hypotheses.push_back(std::move(h));
    }

    out.sort_hypotheses();
    std::erase_if(out.hypotheses, [&](const auto& h) { return h.jep < jep_floor; });
    if (static_cast<int>(out.hypotheses.size()) > max_hypotheses)
        out.hypotheses.resize(max_hypotheses);
    const Scalar mass = out.jep_sum();
    if (mass > Scalar(0))
        for (auto& h : out.hypotheses) h.jep /= mass;
    return out;
}

/// Label-wise arithmetic-mean fusion of Bernoulli tracks: fused existence is
/// the weighted mean, fused PDF the existence-proportional mixture. Labels
/// must lie in every agent's label space; a missing track contributes
/// existence zero. Tracks below `ep_floor` are discarded.
template <typename Scalar>
LmbDensity<Scalar> mil_fuse_lmb(const std::vector<LmbDensity<Scalar>>& locals,
                                const FusionWeights<Scalar>& weights,
                                const GmReduceParams& reduce = GmReduceParams{},
                                Scalar ep_floor = Scalar(1e-5)) {
    if (locals.empty()) throw std::invalid_argument("mil_fuse_lmb: no inputs");
    weights.validate(locals.size());
    detail::require_common_label_space<Scalar>(locals);

    LmbDensity<Scalar> out;
    out.label_space = locals[0].label_space;
    for (const Label& l : out.label_space) {
        Scalar fused_r = Scalar(0);
        for (std::size_t i = 0; i < locals.size(); ++i)
            fused_r += weights.w[i] * locals[i].existence_of(l);
        if (!(fused_r > Scalar(0)) || fused_r < ep_floor) continue;
        GaussianMixture<Scalar> mix;
        for (std::size_t i = 0; i < locals.size(); ++i) {
            const auto* t = locals[i].find(l);
            if (!t || !(t->existence > Scalar(0))) continue;
            const Scalar share = weights.w[i] * t->existence / fused_r;
            GaussianMixture<Scalar> part = t->pdf;
            part.scale_weights(share);
            mix.components.insert(mix.components.end(), part.components.begin(),
                                  part.components.end());
        }
        BernoulliTrack<Scalar> fused;
        fused.label = l;
        fused.existence = fused_r;
        fused.pdf = gm_reduce(mix, reduce);
        out.add_track(std::move(fused));
    }
    return out;
}

/// Normalized weighted geometric-mean fusion of Bernoulli tracks (the
/// covariance-intersection baseline). Mixture powers use the component-wise
/// approximation; the running product is reduced between folds. A label
/// missing anywhere has existence zero after fusion and is dropped.
template <typename Scalar>
LmbDensity<Scalar> gci_fuse_lmb(const std::vector<LmbDensity<Scalar>>& locals,
                                const FusionWeights<Scalar>& weights,
                                const GmReduceParams& reduce = GmReduceParams{},
                                Scalar ep_floor = Scalar(1e-5)) {
    if (locals.empty()) throw std::invalid_argument("gci_fuse_lmb: no inputs");
    weights.validate(locals.size());

    LabelSet all;
    for (const auto& d : locals) all = set_union(all, d.track_labels());

    LmbDensity<Scalar> out;
    for (const auto& d : locals) out.label_space = set_union(out.label_space, d.label_space);

    for (const Label& l : all) {
        Scalar log_exist = Scalar(0);
        Scalar log_miss = Scalar(0);
        GaussianMixture<Scalar> prod;
        bool dead = false;
        for (std::size_t i = 0; i < locals.size(); ++i) {
            const auto* t = locals[i].find(l);
            const Scalar r = t ? t->existence : Scalar(0);
            if (weights.w[i] <= Scalar(0)) continue;
            if (!(r > Scalar(0))) {
                dead = true;  // zero power product
                log_miss += weights.w[i] * std::log(Scalar(1) - r);
                continue;
            }
            log_exist += weights.w[i] * std::log(r);
            log_miss += weights.w[i] * std::log(std::max(Scalar(1) - r, Scalar(0)));
            GaussianMixture<Scalar> powered = gm_power(t->pdf, weights.w[i]);
            prod = prod.empty() ? std::move(powered)
                                : gm_reduce(gm_product(prod, powered), reduce);
        }
        if (dead || prod.empty()) continue;
        const Scalar mass = prod.total_weight();
        const Scalar a = std::exp(log_exist) * mass;
        const Scalar b = std::exp(log_miss);
        if (!(a + b > Scalar(0))) continue;
        const Scalar fused_r = a / (a + b);
        if (fused_r < ep_floor) continue;
        BernoulliTrack<Scalar> fused;
        fused.label = l;
        fused.existence = fused_r;
        fused.pdf = std::move(prod);
        fused.pdf.normalize();
        out.add_track(std::move(fused));
    }
    return out;
}

/// Geometric-mean fusion of hypothesis-table densities: fused jeps are the
/// normalized weighted geometric means of the local jeps (a hypothesis
/// missing anywhere dies), and per-label PDFs are normalized products of the
/// powered local PDFs.
template <typename Scalar>
MdglmbDensity<Scalar> gci_fuse_mdglmb(const std::vector<MdglmbDensity<Scalar>>& locals,
                                      const FusionWeights<Scalar>& weights,
                                      const GmReduceParams& reduce = GmReduceParams{},
                                      Scalar jep_floor = Scalar(1e-20),
                                      int max_hypotheses = 100) {
    if (locals.empty()) throw std::invalid_argument("gci_fuse_mdglmb: no inputs");
    weights.validate(locals.size());

    std::set<LabelSet> keys;
    for (const auto& d : locals)
        for (const auto& h : d.hypotheses) keys.insert(h.labels);

    MdglmbDensity<Scalar> out;
    for (const auto& d : locals) out.label_space = set_union(out.label_space, d.label_space);

    std::vector<Scalar> log_jep;
    for (const LabelSet& set : keys) {
        Scalar lw = Scalar(0);
        bool dead = false;
        for (std::size_t i = 0; i < locals.size() && !dead; ++i) {
            const Scalar p = locals[i].jep_of(set);
            if (!(p > Scalar(0)))
                dead = true;
            else
                lw += weights.w[i] * std::log(p);
        }
        if (dead) continue;

        Hypothesis<Scalar> h;
        h.labels = set;
        for (const Label& l : set) {
            GaussianMixture<Scalar> prod;
            for (std::size_t i = 0; i < locals.size(); ++i) {
                const GaussianMixture<Scalar>* mix = nullptr;
                for (const auto& hyp : locals[i].hypotheses)
                    if (hyp.labels == set) mix = &hyp.pdfs.at(l);
                GaussianMixture<Scalar> powered = gm_power(*mix, weights.w[i]);
                prod = prod.empty() ? std::move(powered)
                                    : gm_reduce(gm_product(prod, powered), reduce);
            }
            lw += std::log(std::max(prod.total_weight(), Scalar(1e-300)));
            prod.normalize();
            h.pdfs[l] = std::move(prod);
        }
        log_jep.push_back(lw);
        out.hypotheses.push_back(std::move(h));
    }

    if (out.hypotheses.empty())
        throw std::invalid_argument("gci_fuse_mdglmb: no common hypotheses");
    const Scalar top = *std::max_element(log_jep.begin(), log_jep.end());
    Scalar mass = Scalar(0);
    for (std::size_t i = 0; i < log_jep.size(); ++i) {
        out.hypotheses[i].jep = std::exp(log_jep[i] - top);
        mass += out.hypotheses[i].jep;
    }
    for (auto& h : out.hypotheses) h.jep /= mass;
    out.sort_hypotheses();
    std::erase_if(out.hypotheses, [&](const auto& h) { return h.jep < jep_floor; });
    if (static_cast<int>(out.hypotheses.size()) > max_hypotheses)
        out.hypotheses.resize(max_hypotheses);
    const Scalar mass2 = out.jep_sum();
    if (mass2 > Scalar(0))
        for (auto& h : out.hypotheses) h.jep /= mass2;
    return out;
}

/// Arithmetic-mean fusion of plain mixtures: concatenate the reweighted
/// components, then reduce.
template <typename Scalar>
GaussianMixture<Scalar> mil_fuse_gm(const std::vector<GaussianMixture<Scalar>>& mixes,
                                    const std::vector<Scalar>& mix_weights,
                                    const GmReduceParams& reduce = GmReduceParams{}) {
    if (mixes.size() != mix_weights.size())
        throw std::invalid_argument("mil_fuse_gm: weight count mismatch");
    Scalar s = Scalar(0);
    for (Scalar x : mix_weights) s += x;
    if (std::abs(s - Scalar(1)) > Scalar(1e-9))
        throw std::invalid_argument("mil_fuse_gm: weights must sum to 1");
    GaussianMixture<Scalar> cat;
    for (std::size_t i = 0; i < mixes.size(); ++i) {
        GaussianMixture<Scalar> part = mixes[i];
        part.scale_weights(mix_weights[i]);
        cat.components.insert(cat.components.end(), part.components.begin(),
                              part.components.end());
    }
    return gm_reduce(cat, reduce);
}

struct BoundCheckResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    bool rhs_infinite = false;
};

namespace detail {

/// Joint product of per-label pmfs over every tuple of grid states, streamed
/// through a callback as (joint index, product value per density).
template <typename Scalar, typename Fn>
void for_each_joint_state(const std::vector<const std::map<Label, Eigen::VectorX<Scalar>>*>&
                              pmfs,
                          const LabelSet& set, Eigen::Index grid_size, Fn&& fn) {
    const std::size_t n = set.size();
    std::vector<Eigen::Index> idx(n, 0);
    std::vector<Scalar> value(pmfs.size());
    while (true) {
        for (std::size_t d = 0; d < pmfs.size(); ++d) {
            Scalar v = Scalar(1);
            if (pmfs[d] == nullptr) {
                value[d] = Scalar(0);
                continue;
            }
            for (std::size_t k = 0; k < n; ++k) v *= pmfs[d]->at(set[k])(idx[k]);
            value[d] = v;
        }
        fn(value);
        std::size_t k = 0;
        for (; k < n; ++k) {
            if (++idx[k] < grid_size) break;
            idx[k] = 0;
        }
        if (k == n) break;
    }
}

}  // namespace detail

/// Check that the KLD from the exact weighted-mean density to its fused
/// same-family approximation stays below the weighted sum of pairwise local
/// KLDs, with everything evaluated exactly on a finite grid.
template <typename Scalar>
BoundCheckResult thm2_bound_check(const std::vector<MdglmbDensity<Scalar>>& locals,
                                  const FusionWeights<Scalar>& weights,
                                  const StateGrid<Scalar>& grid) {
    if (locals.empty()) throw std::invalid_argument("thm2_bound_check: no inputs");
    weights.validate(locals.size());
    detail::require_common_label_space<Scalar>(locals);
    if (locals[0].label_space.size() > 6)
        throw std::invalid_argument("thm2_bound_check: label space too large");

    std::vector<DiscreteMdglmb<Scalar>> disc;
    disc.reserve(locals.size());
    for (const auto& d : locals) disc.push_back(discretize(d, grid));

    // Fused density within the family, on the discretized conditionals.
    DiscreteMdglmb<Scalar> fused;
    for (std::size_t i = 0; i < disc.size(); ++i)
        for (const auto& [set, e] : disc[i].hypotheses)
            fused.hypotheses[set].jep += weights.w[i] * e.jep;
    for (auto& [set, ef] : fused.hypotheses) {
        if (!(ef.jep > Scalar(0))) continue;
        for (const Label& l : set) {
            Eigen::VectorX<Scalar> pmf = Eigen::VectorX<Scalar>::Zero(grid.size());
            for (std::size_t i = 0; i < disc.size(); ++i) {
                auto it = disc[i].hypotheses.find(set);
                if (it == disc[i].hypotheses.end()) continue;
                const Scalar share = weights.w[i] * it->second.jep / ef.jep;
                if (share > Scalar(0)) pmf += share * it->second.pmfs.at(l);
            }
            ef.pmfs[l] = std::move(pmf);
        }
    }

    BoundCheckResult res;

    // Left side: KLD from the exact mixture to the family-constrained fusion.
    Scalar lhs = Scalar(0);
    for (const auto& [set, ef] : fused.hypotheses) {
        if (!(ef.jep > Scalar(0))) continue;
        std::vector<const std::map<Label, Eigen::VectorX<Scalar>>*> pmfs;
        std::vector<Scalar> jeps;
        for (std::size_t i = 0; i < disc.size(); ++i) {
            auto it = disc[i].hypotheses.find(set);
            pmfs.push_back(it == disc[i].hypotheses.end() ? nullptr : &it->second.pmfs);
            jeps.push_back(it == disc[i].hypotheses.end() ? Scalar(0) : it->second.jep);
        }
        const auto* fused_pmfs = &ef.pmfs;
        const Scalar fused_jep = ef.jep;
        detail::for_each_joint_state<Scalar>(
            [&] {
                auto all = pmfs;
                all.push_back(fused_pmfs);
                return all;
            }(),
            set, grid.size(), [&](const std::vector<Scalar>& value) {
                Scalar mix = Scalar(0);
                for (std::size_t i = 0; i < disc.size(); ++i)
                    mix += weights.w[i] * jeps[i] * value[i];
                if (!(mix > Scalar(0))) return;
                const Scalar target = fused_jep * value.back();
                lhs += mix * std::log(mix / target);
            });
    }
    res.lhs = std::max(lhs, Scalar(0));

    // Right side: weighted pairwise KLDs between the locals.
    Scalar rhs = Scalar(0);
    for (std::size_t i = 0; i < disc.size() && std::isfinite(rhs); ++i)
        for (std::size_t j = 0; j < disc.size(); ++j) {
            if (i == j) continue;
            const Scalar d = kld_discrete(disc[i], disc[j]);
            if (!std::isfinite(d)) {
                rhs = std::numeric_limits<Scalar>::infinity();
                res.rhs_infinite = true;
                break;
            }
            rhs += weights.w[i] * weights.w[j] * d;
        }
    res.rhs = rhs;
    res.holds = res.lhs <= res.rhs + 1e-9;
    return res;
}

template <typename Scalar>
BoundCheckResult thm2_bound_check(const std::vector<LmbDensity<Scalar>>& locals,
                                  const FusionWeights<Scalar>& weights,
                                  const StateGrid<Scalar>& grid) {
    std::vector<MdglmbDensity<Scalar>> expanded;
    expanded.reserve(locals.size());
    for (const auto& d : locals) expanded.push_back(lmb_to_mdglmb(d));
    return thm2_bound_check(expanded, weights, grid);
}

}  // namespace lrfs
