#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "lrfs/gaussian.hpp"
#include "lrfs/label.hpp"
#include "lrfs/lmb.hpp"

namespace lrfs {

/// One label-set hypothesis of a marginalized density: the set exists with
/// probability jep, and conditionally on that the track states are
/// independent with the given per-label PDFs.
template <typename Scalar = double>
struct Hypothesis {
    LabelSet labels;
    Scalar jep = Scalar(0);
    std::map<Label, GaussianMixture<Scalar>> pdfs;  // keys == labels
};

/// Density over label sets with track-independent conditionals; hypothesis
/// label sets are pairwise distinct and the jeps sum to one.
template <typename Scalar = double>
struct MdglmbDensity {
    std::vector<Hypothesis<Scalar>> hypotheses;
    LabelSet label_space;

    [[nodiscard]] Scalar jep_of(const LabelSet& set) const {
        for (const auto& h : hypotheses)
            if (h.labels == set) return h.jep;
        return Scalar(0);
    }

    [[nodiscard]] Scalar jep_sum() const {
        Scalar s = Scalar(0);
        for (const auto& h : hypotheses) s += h.jep;
        return s;
    }

    /// Serialization order: descending jep, ties by label set.
    void sort_hypotheses() {
        std::sort(hypotheses.begin(), hypotheses.end(), [](const auto& a, const auto& b) {
            if (a.jep != b.jep) return a.jep > b.jep;
            return a.labels < b.labels;
        });
    }

    /// Shrink the label space to the labels named by surviving hypotheses.
    void compact_label_space() {
        LabelSet all;
        for (const auto& h : hypotheses) all = set_union(all, h.labels);
        label_space = std::move(all);
    }
};

/// Expand an LMB into the explicit hypothesis-per-subset form. The label
/// space must stay within the enumeration cap.
template <typename Scalar>
MdglmbDensity<Scalar> lmb_to_mdglmb(const LmbDensity<Scalar>& density, int cap = 12) {
    MdglmbDensity<Scalar> out;
    out.label_space = density.label_space;
    for (LabelSet& subset : enumerate_subsets(density.label_space, cap)) {
        Hypothesis<Scalar> h;
        h.jep = lmb_jep(density, subset);
        for (const Label& l : subset) {
            const auto* t = density.find(l);
            h.pdfs[l] = t ? t->pdf : GaussianMixture<Scalar>{};
        }
        h.labels = std::move(subset);
        out.hypotheses.push_back(std::move(h));
    }
    out.sort_hypotheses();
    return out;
}

/// Collapse to an LMB by matching the first moment: r_l sums the jeps of the
/// sets containing l, and f_l is the jep-weighted union of the conditionals.
/// Labels with zero marginal existence are dropped.
template <typename Scalar>
LmbDensity<Scalar> mdglmb_to_lmb(const MdglmbDensity<Scalar>& density) {
    LmbDensity<Scalar> out;
    out.label_space = density.label_space;
    std::map<Label, Scalar> existence;
    std::map<Label, GaussianMixture<Scalar>> mixes;
    for (const auto& h : density.hypotheses) {
        for (const Label& l : h.labels) {
            existence[l] += h.jep;
            if (h.jep <= Scalar(0)) continue;
            auto it = h.pdfs.find(l);
            if (it == h.pdfs.end())
                throw std::invalid_argument("hypothesis missing pdf for its label");
            GaussianMixture<Scalar> scaled = it->second;
            scaled.scale_weights(h.jep);
            auto& acc = mixes[l];
            acc.components.insert(acc.components.end(), scaled.components.begin(),
                                  scaled.components.end());
        }
    }
    for (auto& [label, r] : existence) {
        if (r <= Scalar(0)) continue;
        BernoulliTrack<Scalar> t;
        t.label = label;
        t.existence = r;
        t.pdf = std::move(mixes[label]);
        t.pdf.scale_weights(Scalar(1) / r);
        out.add_track(std::move(t));
    }
    return out;
}

/// First-moment intensity at x, summed over labels.
template <typename Scalar, typename Derived>
Scalar phd(const LmbDensity<Scalar>& density, const Eigen::MatrixBase<Derived>& x) {
    Scalar v = Scalar(0);
    for (const auto& t : density.tracks) v += t.existence * pdf(t.pdf, x);
    return v;
}

template <typename Scalar, typename Derived>
Scalar phd(const MdglmbDensity<Scalar>& density, const Eigen::MatrixBase<Derived>& x) {
    Scalar v = Scalar(0);
    for (const auto& h : density.hypotheses) {
        if (h.jep <= Scalar(0)) continue;
        for (const auto& [label, mix] : h.pdfs) v += h.jep * pdf(mix, x);
    }
    return v;
}

}  // namespace lrfs
