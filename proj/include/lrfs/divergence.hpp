#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "lrfs/gaussian.hpp"
#include "lrfs/label.hpp"
#include "lrfs/lmb.hpp"
#include "lrfs/sigma_points.hpp"

namespace lrfs {

enum class DivergenceKind { KldSigmaPoint, CsdAnalytic, JsdSigmaPoint };

template <typename Scalar = double>
constexpr Scalar infinite_cost() {
    return std::numeric_limits<Scalar>::infinity();
}

struct KldDiagnostics {
    int floored_points = 0;  // sigma points where the second density underflowed
};

/// Kullback-Leibler divergence D(f1 || f2) between Gaussian mixtures,
/// approximated by propagating unscented sigma points of each component of
/// f1. Deterministic; clamped below at zero. Underflow of f2 at a sigma
/// point is clamped at the log floor and reported through `diag`.
template <typename Scalar>
Scalar kld_gm(const GaussianMixture<Scalar>& f1, const GaussianMixture<Scalar>& f2,
              KldDiagnostics* diag = nullptr) {
    static const Scalar log_floor = std::log(Scalar(1e-300));
    Scalar acc = Scalar(0);
    for (const auto& c : f1.components) {
        SigmaPoints<Scalar> sp = sigma_points(c.mean, c.cov);
        Scalar comp = Scalar(0);
        for (Eigen::Index s = 0; s < sp.weights.size(); ++s) {
            const auto x = sp.points.col(s);
            Scalar l1 = log_pdf(f1, x);
            Scalar l2 = log_pdf(f2, x);
            if (l2 < log_floor) {
                l2 = log_floor;
                if (diag) ++diag->floored_points;
            }
            if (l1 < log_floor) l1 = log_floor;
            comp += sp.weights(s) * (l1 - l2);
        }
        acc += c.weight * comp;
    }
    return std::max(acc, Scalar(0));
}

/// Cauchy-Schwarz divergence, evaluated exactly from pairwise Gaussian
/// overlap integrals. Symmetric; zero iff the mixtures coincide.
template <typename Scalar>
Scalar csd_gm(const GaussianMixture<Scalar>& f1, const GaussianMixture<Scalar>& f2) {
    auto inner = [](const GaussianMixture<Scalar>& a, const GaussianMixture<Scalar>& b) {
        Scalar s = Scalar(0);
        for (const auto& ca : a.components)
            for (const auto& cb : b.components)
                s += ca.weight * cb.weight *
                     gauss_pdf<Scalar>(ca.mean, cb.mean, (ca.cov + cb.cov).eval());
        return s;
    };
    const Scalar cross = inner(f1, f2);
    const Scalar n1 = inner(f1, f1);
    const Scalar n2 = inner(f2, f2);
    if (!(cross > Scalar(0)) || !(n1 > Scalar(0)) || !(n2 > Scalar(0)))
        return infinite_cost<Scalar>();
    return std::max(-std::log(cross / std::sqrt(n1 * n2)), Scalar(0));
}

/// Jensen-Shannon divergence: the symmetrized sigma-point KLD.
template <typename Scalar>
Scalar jsd_gm(const GaussianMixture<Scalar>& f1, const GaussianMixture<Scalar>& f2,
              KldDiagnostics* diag = nullptr) {
    return Scalar(0.5) * (kld_gm(f1, f2, diag) + kld_gm(f2, f1, diag));
}

/// Chernoff coefficient C_w = int f1^w f2^(1-w) dx. Exact for single
/// Gaussians; mixtures use the component-wise power approximation followed
/// by exact pairwise integrals. Returns exactly 1 at w = 0 or 1.
template <typename Scalar>
Scalar chernoff_gm(const GaussianMixture<Scalar>& f1, const GaussianMixture<Scalar>& f2,
                   Scalar w) {
    if (w < Scalar(0) || w > Scalar(1))
        throw std::invalid_argument("chernoff_gm: weight outside [0,1]");
    if (w == Scalar(0) || w == Scalar(1)) return Scalar(1);
    GaussianMixture<Scalar> p1 = gm_power(f1, w);
    GaussianMixture<Scalar> p2 = gm_power(f2, Scalar(1) - w);
    return gm_product(p1, p2).total_weight();
}

/// Pairwise Bernoulli-track discrepancy used for label-wise geometric-mean
/// fusion: -log[(1-r1)^w1 (1-r2)^w2 + r1^w1 r2^w2 * int f1^w1 f2^w2 dx].
template <typename Scalar>
Scalar gci_divergence_bc(const BernoulliTrack<Scalar>& t1, const BernoulliTrack<Scalar>& t2,
                         Scalar w1, Scalar w2) {
    if (std::abs(w1 + w2 - Scalar(1)) > Scalar(1e-12))
        throw std::invalid_argument("gci_divergence_bc: weights must sum to 1");
    const Scalar miss = std::pow(Scalar(1) - t1.existence, w1) *
                        std::pow(Scalar(1) - t2.existence, w2);
    const Scalar overlap = chernoff_gm(t1.pdf, t2.pdf, w1);
    const Scalar hit = std::pow(t1.existence, w1) * std::pow(t2.existence, w2) * overlap;
    const Scalar arg = miss + hit;
    if (!(arg > Scalar(0))) return infinite_cost<Scalar>();
    return std::max(-std::log(arg), Scalar(0));
}

/// KLD between Bernoulli distributions with parameters r1, r2, with the
/// 0 log 0 = 0 convention. Mismatched boundary at r2 in {0,1} is infinite.
template <typename Scalar>
Scalar kld_bernoulli(Scalar r1, Scalar r2) {
    auto term = [](Scalar p, Scalar q) -> Scalar {
        if (p == Scalar(0)) return Scalar(0);
        if (q == Scalar(0)) return infinite_cost<Scalar>();
        return p * std::log(p / q);
    };
    const Scalar a = term(r1, r2);
    const Scalar b = term(Scalar(1) - r1, Scalar(1) - r2);
    return std::max(a + b, Scalar(0));
}

/// Discrete KLD between joint-existence tables. Support violations return
/// the infinity sentinel; the offending set is reported when asked for.
template <typename Scalar>
Scalar kld_jep(const std::map<LabelSet, Scalar>& p1, const std::map<LabelSet, Scalar>& p2,
               const LabelSet** offending = nullptr) {
    Scalar acc = Scalar(0);
    for (const auto& [set, p] : p1) {
        if (p <= Scalar(0)) continue;
        auto it = p2.find(set);
        const Scalar q = it == p2.end() ? Scalar(0) : it->second;
        if (q <= Scalar(0)) {
            if (offending) *offending = &set;
            return infinite_cost<Scalar>();
        }
        acc += p * std::log(p / q);
    }
    return std::max(acc, Scalar(0));
}

/// PDF-only matching cost used by label matching.
template <typename Scalar>
Scalar pdf_divergence(DivergenceKind kind, const GaussianMixture<Scalar>& f1,
                      const GaussianMixture<Scalar>& f2) {
    switch (kind) {
        case DivergenceKind::KldSigmaPoint: return kld_gm(f1, f2);
        case DivergenceKind::CsdAnalytic: return csd_gm(f1, f2);
        case DivergenceKind::JsdSigmaPoint: return jsd_gm(f1, f2);
    }
    throw std::logic_error("unknown divergence kind");
}

}  // namespace lrfs
