#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "lrfs/label.hpp"
#include "lrfs/lmb.hpp"
#include "lrfs/mdglmb.hpp"

namespace lrfs {

/// One term of a joint conditional: weight times a product of per-label PDFs.
template <typename Scalar = double>
struct ProductTerm {
    Scalar weight = Scalar(1);
    std::map<Label, GaussianMixture<Scalar>> factors;
};

/// Joint conditional PDF over the states of a label set, stored as a weighted
/// sum of product terms. Inputs typically have one term; arithmetic-mean
/// fusion produces several.
template <typename Scalar = double>
struct JointConditional {
    std::vector<ProductTerm<Scalar>> terms;

    [[nodiscard]] Scalar weight_sum() const {
        Scalar s = Scalar(0);
        for (const auto& t : terms) s += t.weight;
        return s;
    }

    /// Evaluate at one state per label.
    [[nodiscard]] Scalar evaluate(
        const std::map<Label, Eigen::VectorX<Scalar>>& states) const {
        Scalar v = Scalar(0);
        for (const auto& term : terms) {
            Scalar prod = term.weight;
            for (const auto& [label, mix] : term.factors) {
                auto it = states.find(label);
                if (it == states.end())
                    throw std::invalid_argument("missing state for label");
                prod *= pdf(mix, it->second);
            }
            v += prod;
        }
        return v;
    }

    /// Marginal onto a label subset: unit-mass factors integrate out, so the
    /// term weights survive and only the kept factors remain.
    [[nodiscard]] JointConditional marginal(const LabelSet& keep) const {
        JointConditional out;
        out.terms.reserve(terms.size());
        for (const auto& term : terms) {
            ProductTerm<Scalar> t;
            t.weight = term.weight;
            for (const Label& l : keep) {
                auto it = term.factors.find(l);
                if (it != term.factors.end()) t.factors[l] = it->second;
            }
            out.terms.push_back(std::move(t));
        }
        return out;
    }
};

/// Explicit joint-existence table over label subsets with the corresponding
/// joint conditionals. This is the brute-force representation; it is only
/// meant for small label spaces.
template <typename Scalar = double>
struct GeneralLrfs {
    std::map<LabelSet, Scalar> jep;
    std::map<LabelSet, JointConditional<Scalar>> cjpdf;
    LabelSet label_space;

    [[nodiscard]] Scalar jep_of(const LabelSet& set) const {
        auto it = jep.find(set);
        return it == jep.end() ? Scalar(0) : it->second;
    }

    [[nodiscard]] Scalar jep_sum() const {
        Scalar s = Scalar(0);
        for (const auto& [set, p] : jep) s += p;
        return s;
    }
};

template <typename Scalar>
GeneralLrfs<Scalar> to_general(const MdglmbDensity<Scalar>& density) {
    GeneralLrfs<Scalar> out;
    out.label_space = density.label_space;
    for (const auto& h : density.hypotheses) {
        out.jep[h.labels] += h.jep;
        if (h.labels.empty()) continue;
        ProductTerm<Scalar> term;
        term.weight = Scalar(1);
        term.factors = h.pdfs;
        out.cjpdf[h.labels].terms.push_back(std::move(term));
    }
    return out;
}

template <typename Scalar>
GeneralLrfs<Scalar> to_general(const LmbDensity<Scalar>& density, int cap = 12) {
    return to_general(lmb_to_mdglmb(density, cap));
}

}  // namespace lrfs
