#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "lrfs/gaussian.hpp"
#include "lrfs/label.hpp"

namespace lrfs {

/// Bernoulli track: a label that exists with probability `existence` and, if
/// it does, has kinematic state distributed as `pdf`.
template <typename Scalar = double>
struct BernoulliTrack {
    Label label;
    Scalar existence = Scalar(0);
    GaussianMixture<Scalar> pdf;
};

/// Labeled multi-Bernoulli density: independent Bernoulli tracks, one per
/// label. label_space may contain labels with no track (implicit existence 0).
template <typename Scalar = double>
struct LmbDensity {
    std::vector<BernoulliTrack<Scalar>> tracks;  // sorted by label, unique
    LabelSet label_space;

    [[nodiscard]] const BernoulliTrack<Scalar>* find(const Label& l) const {
        auto it = std::lower_bound(tracks.begin(), tracks.end(), l,
                                   [](const auto& t, const Label& x) { return t.label < x; });
        if (it != tracks.end() && it->label == l) return &*it;
        return nullptr;
    }

    [[nodiscard]] Scalar existence_of(const Label& l) const {
        const auto* t = find(l);
        return t ? t->existence : Scalar(0);
    }

    void add_track(BernoulliTrack<Scalar> t) {
        if (!contains(label_space, t.label))
            label_space = set_union(label_space, {t.label});
        auto it = std::lower_bound(tracks.begin(), tracks.end(), t.label,
                                   [](const auto& a, const Label& x) { return a.label < x; });
        if (it != tracks.end() && it->label == t.label)
            throw std::invalid_argument("duplicate track label");
        tracks.insert(it, std::move(t));
    }

    [[nodiscard]] LabelSet track_labels() const {
        LabelSet out;
        out.reserve(tracks.size());
        for (const auto& t : tracks) out.push_back(t.label);
        return out;
    }

    /// Shrink the label space to the labels that still carry tracks.
    void compact_label_space() { label_space = track_labels(); }
};

/// Joint existence probability of exactly `label_set` under an LMB density,
/// computed in product form prod_{l in L} r_l * prod_{l not in L} (1 - r_l)
/// so that r_l = 1 needs no special casing.
template <typename Scalar>
Scalar lmb_jep(const LmbDensity<Scalar>& density, const LabelSet& label_set) {
    if (!is_subset(label_set, density.label_space))
        throw std::invalid_argument("unknown label");
    Scalar p = Scalar(1);
    for (const Label& l : density.label_space) {
        const Scalar r = density.existence_of(l);
        p *= contains(label_set, l) ? r : (Scalar(1) - r);
    }
    return p;
}

}  // namespace lrfs
