#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "lrfs/gaussian.hpp"
#include "lrfs/label.hpp"
#include "lrfs/mdglmb.hpp"

namespace lrfs {

/// Finite set of states treated as a discrete state space; PDFs become
/// probability mass vectors over the points. Makes KLDs between whole
/// multi-object densities exactly computable.
template <typename Scalar = double>
struct StateGrid {
    Eigen::MatrixX<Scalar> points;  // d x n

    [[nodiscard]] Eigen::Index size() const { return points.cols(); }

    static StateGrid uniform_1d(Scalar lo, Scalar hi, Eigen::Index n) {
        StateGrid g;
        g.points.resize(1, n);
        for (Eigen::Index i = 0; i < n; ++i)
            g.points(0, i) = lo + (hi - lo) * Scalar(i) / Scalar(n - 1);
        return g;
    }
};

template <typename Scalar>
Eigen::VectorX<Scalar> discretize(const GaussianMixture<Scalar>& mix,
                                  const StateGrid<Scalar>& grid) {
    Eigen::VectorX<Scalar> pmf(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) pmf(i) = pdf(mix, grid.points.col(i));
    const Scalar total = pmf.sum();
    if (!(total > Scalar(0)))
        throw std::invalid_argument("discretize: mixture vanishes on the grid");
    return pmf / total;
}

/// Grid-discretized counterpart of MdglmbDensity.
template <typename Scalar = double>
struct DiscreteMdglmb {
    struct Entry {
        Scalar jep = Scalar(0);
        std::map<Label, Eigen::VectorX<Scalar>> pmfs;
    };
    std::map<LabelSet, Entry> hypotheses;

    [[nodiscard]] std::map<LabelSet, Scalar> jep_table() const {
        std::map<LabelSet, Scalar> out;
        for (const auto& [set, e] : hypotheses) out[set] = e.jep;
        return out;
    }
};

template <typename Scalar>
DiscreteMdglmb<Scalar> discretize(const MdglmbDensity<Scalar>& density,
                                  const StateGrid<Scalar>& grid) {
    DiscreteMdglmb<Scalar> out;
    for (const auto& h : density.hypotheses) {
        auto& e = out.hypotheses[h.labels];
        e.jep += h.jep;
        for (const auto& [label, mix] : h.pdfs) e.pmfs[label] = discretize(mix, grid);
    }
    return out;
}

template <typename Scalar>
Scalar kld_pmf(const Eigen::VectorX<Scalar>& p, const Eigen::VectorX<Scalar>& q) {
    Scalar acc = Scalar(0);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p(i) <= Scalar(0)) continue;
        if (q(i) <= Scalar(0)) return std::numeric_limits<Scalar>::infinity();
        acc += p(i) * std::log(p(i) / q(i));
    }
    return std::max(acc, Scalar(0));
}

/// Exact KLD between two discretized densities: the discrete-jep term plus
/// jep-weighted per-track conditional terms.
template <typename Scalar>
Scalar kld_discrete(const DiscreteMdglmb<Scalar>& a, const DiscreteMdglmb<Scalar>& b) {
    Scalar acc = Scalar(0);
    for (const auto& [set, ea] : a.hypotheses) {
        if (ea.jep <= Scalar(0)) continue;
        auto it = b.hypotheses.find(set);
        const Scalar q = it == b.hypotheses.end() ? Scalar(0) : it->second.jep;
        if (q <= Scalar(0)) return std::numeric_limits<Scalar>::infinity();
        acc += ea.jep * std::log(ea.jep / q);
        for (const Label& l : set) {
            Scalar d = kld_pmf(ea.pmfs.at(l), it->second.pmfs.at(l));
            if (!std::isfinite(d)) return std::numeric_limits<Scalar>::infinity();
            acc += ea.jep * d;
        }
    }
    return std::max(acc, Scalar(0));
}

}  // namespace lrfs
