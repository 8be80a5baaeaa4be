#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace lrfs {

/// Weighted Gaussian component over a dynamic-dimension state.
template <typename Scalar = double>
struct Gaussian {
    using Vec = Eigen::VectorX<Scalar>;
    using Mat = Eigen::MatrixX<Scalar>;

    Scalar weight = Scalar(1);
    Vec mean;
    Mat cov;

    Gaussian() = default;
    Gaussian(Scalar w, Vec m, Mat P) : weight(w), mean(std::move(m)), cov(std::move(P)) {}

    [[nodiscard]] Eigen::Index dim() const { return mean.size(); }
};

/// log N(x; mean, cov). Covariance must be positive definite.
template <typename Scalar, typename Derived>
Scalar log_gauss_pdf(const Eigen::MatrixBase<Derived>& x,
                     const Eigen::VectorX<Scalar>& mean,
                     const Eigen::MatrixX<Scalar>& cov) {
    const Eigen::Index d = mean.size();
    Eigen::LLT<Eigen::MatrixX<Scalar>> llt(cov);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("covariance not positive definite");
    Eigen::VectorX<Scalar> diff = x - mean;
    Eigen::VectorX<Scalar> z = llt.matrixL().solve(diff);
    Scalar log_det = Scalar(0);
    for (Eigen::Index i = 0; i < d; ++i)
        log_det += Scalar(2) * std::log(llt.matrixL()(i, i));
    return Scalar(-0.5) * (z.squaredNorm() + log_det +
                           Scalar(d) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>));
}

template <typename Scalar, typename Derived>
Scalar gauss_pdf(const Eigen::MatrixBase<Derived>& x,
                 const Eigen::VectorX<Scalar>& mean,
                 const Eigen::MatrixX<Scalar>& cov) {
    return std::exp(log_gauss_pdf(x, mean, cov));
}

/// Mixture of weighted Gaussian components. Represents a PDF when the
/// weights sum to one; intermediate results may carry other total mass.
template <typename Scalar = double>
struct GaussianMixture {
    using Vec = typename Gaussian<Scalar>::Vec;
    using Mat = typename Gaussian<Scalar>::Mat;

    std::vector<Gaussian<Scalar>> components;

    GaussianMixture() = default;
    explicit GaussianMixture(std::vector<Gaussian<Scalar>> comps)
        : components(std::move(comps)) {}

    [[nodiscard]] bool empty() const { return components.empty(); }
    [[nodiscard]] std::size_t size() const { return components.size(); }
    [[nodiscard]] Eigen::Index dim() const {
        return components.empty() ? 0 : components.front().dim();
    }

    [[nodiscard]] Scalar total_weight() const {
        Scalar s = Scalar(0);
        for (const auto& c : components) s += c.weight;
        return s;
    }

    void scale_weights(Scalar factor) {
        for (auto& c : components) c.weight *= factor;
    }

    /// Rescale so the weights sum to one.
    void normalize() {
        const Scalar w = total_weight();
        if (w > Scalar(0)) scale_weights(Scalar(1) / w);
    }
};

template <typename Scalar>
GaussianMixture<Scalar> single_gaussian(Scalar w, typename Gaussian<Scalar>::Vec mean,
                                        typename Gaussian<Scalar>::Mat cov) {
    GaussianMixture<Scalar> m;
    m.components.emplace_back(w, std::move(mean), std::move(cov));
    return m;
}

/// Convenience for 1-D mixtures used throughout the tests.
template <typename Scalar = double>
GaussianMixture<Scalar> gaussian1d(Scalar mean, Scalar var, Scalar w = Scalar(1)) {
    typename Gaussian<Scalar>::Vec m(1);
    m << mean;
    typename Gaussian<Scalar>::Mat P(1, 1);
    P << var;
    return single_gaussian<Scalar>(w, std::move(m), std::move(P));
}

template <typename Scalar, typename Derived>
Scalar pdf(const GaussianMixture<Scalar>& mix, const Eigen::MatrixBase<Derived>& x) {
    Scalar v = Scalar(0);
    for (const auto& c : mix.components)
        v += c.weight * gauss_pdf<Scalar>(x, c.mean, c.cov);
    return v;
}

template <typename Scalar, typename Derived>
Scalar log_pdf(const GaussianMixture<Scalar>& mix, const Eigen::MatrixBase<Derived>& x) {
    // log-sum-exp over component log densities
    if (mix.empty()) return -std::numeric_limits<Scalar>::infinity();
    Scalar max_term = -std::numeric_limits<Scalar>::infinity();
    std::vector<Scalar> terms;
    terms.reserve(mix.size());
    for (const auto& c : mix.components) {
        if (c.weight <= Scalar(0)) {
            terms.push_back(-std::numeric_limits<Scalar>::infinity());
            continue;
        }
        Scalar t = std::log(c.weight) + log_gauss_pdf<Scalar>(x, c.mean, c.cov);
        terms.push_back(t);
        max_term = std::max(max_term, t);
    }
    if (!std::isfinite(max_term)) return -std::numeric_limits<Scalar>::infinity();
    Scalar acc = Scalar(0);
    for (Scalar t : terms) acc += std::exp(t - max_term);
    return max_term + std::log(acc);
}

/// First two moments of a mixture, as a single weighted component.
template <typename Scalar>
Gaussian<Scalar> moment_match(const GaussianMixture<Scalar>& mix) {
    if (mix.empty()) throw std::invalid_argument("moment_match: empty mixture");
    const Scalar w = mix.total_weight();
    typename Gaussian<Scalar>::Vec mean = Gaussian<Scalar>::Vec::Zero(mix.dim());
    for (const auto& c : mix.components) mean += (c.weight / w) * c.mean;
    typename Gaussian<Scalar>::Mat cov = Gaussian<Scalar>::Mat::Zero(mix.dim(), mix.dim());
    for (const auto& c : mix.components) {
        typename Gaussian<Scalar>::Vec d = c.mean - mean;
        cov += (c.weight / w) * (c.cov + d * d.transpose());
    }
    return {w, std::move(mean), std::move(cov)};
}

struct GmReduceParams {
    double prune_threshold = 1e-5;
    double merge_threshold = 10.0;  // squared Mahalanobis distance
    int max_components = 20;

    static GmReduceParams none() {
        return {0.0, -1.0, std::numeric_limits<int>::max()};
    }
};

/// Prune weights below threshold, merge components within the squared
/// Mahalanobis merge threshold (moment-matched), cap at max_components, and
/// rescale to the input's total mass. A normalized input never comes back
/// empty: if everything is pruned the moment-matched whole is returned.
template <typename Scalar>
GaussianMixture<Scalar> gm_reduce(const GaussianMixture<Scalar>& mix,
                                  const GmReduceParams& params) {
    if (mix.empty()) return mix;
    const Scalar total = mix.total_weight();

    std::vector<Gaussian<Scalar>> kept;
    for (const auto& c : mix.components)
        if (c.weight >= Scalar(params.prune_threshold)) kept.push_back(c);
    if (kept.empty()) {
        GaussianMixture<Scalar> out;
        out.components.push_back(moment_match(mix));
        return out;
    }

    // Greedy merge around the heaviest remaining component.
    std::vector<Gaussian<Scalar>> merged;
    std::vector<bool> used(kept.size(), false);
    while (true) {
        int best = -1;
        for (std::size_t i = 0; i < kept.size(); ++i)
            if (!used[i] && (best < 0 || kept[i].weight > kept[best].weight))
                best = static_cast<int>(i);
        if (best < 0) break;
        GaussianMixture<Scalar> cluster;
        Eigen::LLT<typename Gaussian<Scalar>::Mat> llt(kept[best].cov);
        for (std::size_t i = 0; i < kept.size(); ++i) {
            if (used[i]) continue;
            if (static_cast<int>(i) == best) {
                cluster.components.push_back(kept[i]);
                used[i] = true;
                continue;
            }
            if (params.merge_threshold < 0) continue;
            typename Gaussian<Scalar>::Vec d = kept[i].mean - kept[best].mean;
            // distance measured in the candidate's own covariance metric
            Eigen::LLT<typename Gaussian<Scalar>::Mat> llt_i(kept[i].cov);
            Scalar dist2 = llt_i.matrixL().solve(d).squaredNorm();
            if (dist2 <= Scalar(params.merge_threshold)) {
                cluster.components.push_back(kept[i]);
                used[i] = true;
            }
        }
        merged.push_back(moment_match(cluster));
    }

    std::sort(merged.begin(), merged.end(),
              [](const auto& a, const auto& b) { return a.weight > b.weight; });
    if (static_cast<int>(merged.size()) > params.max_components)
        merged.resize(params.max_components);

    GaussianMixture<Scalar> out(std::move(merged));
    const Scalar w_out = out.total_weight();
    if (w_out > Scalar(0)) out.scale_weights(total / w_out);
    return out;
}

/// Product of two Gaussians: N(x;m1,P1) N(x;m2,P2) = z N(x;m,P) with the
/// input weights and the overlap factor z folded into the result weight.
template <typename Scalar>
Gaussian<Scalar> gauss_product(const Gaussian<Scalar>& a, const Gaussian<Scalar>& b) {
    using Mat = typename Gaussian<Scalar>::Mat;
    Mat sum = a.cov + b.cov;
    Scalar z = gauss_pdf<Scalar>(a.mean, b.mean, sum);
    Eigen::LLT<Mat> llt(sum);
    Mat K = a.cov * llt.solve(Mat::Identity(sum.rows(), sum.cols()));
    typename Gaussian<Scalar>::Vec mean = a.mean + K * (b.mean - a.mean);
    Mat cov = a.cov - K * a.cov;
    cov = Scalar(0.5) * (cov + cov.transpose()).eval();
    return {a.weight * b.weight * z, std::move(mean), std::move(cov)};
}

/// Exponentiated Gaussian: N(x;m,P)^w = eta N(x;m,P/w); eta is folded into
/// the component weight (weight^w likewise). Requires w > 0.
template <typename Scalar>
Gaussian<Scalar> gauss_power(const Gaussian<Scalar>& g, Scalar w) {
    if (!(w > Scalar(0))) throw std::invalid_argument("gauss_power: exponent must be > 0");
    const Scalar d = Scalar(g.dim());
    Eigen::LLT<typename Gaussian<Scalar>::Mat> llt(g.cov);
    Scalar log_det = Scalar(0);
    for (Eigen::Index i = 0; i < g.dim(); ++i)
        log_det += Scalar(2) * std::log(llt.matrixL()(i, i));
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    Scalar log_eta = Scalar(0.5) * (Scalar(1) - w) * (d * std::log(two_pi) + log_det) -
                     Scalar(0.5) * d * std::log(w);
    Scalar weight = std::pow(g.weight, w) * std::exp(log_eta);
    return {weight, g.mean, g.cov / w};
}

/// Component-wise power approximation of a mixture:
/// (sum_m a_m N_m)^w ~= sum_m a_m^w N_m^w. Exact for single components.
template <typename Scalar>
GaussianMixture<Scalar> gm_power(const GaussianMixture<Scalar>& mix, Scalar w) {
    GaussianMixture<Scalar> out;
    out.components.reserve(mix.size());
    for (const auto& c : mix.components) out.components.push_back(gauss_power(c, w));
    return out;
}

/// Exact pairwise product of two mixtures (component count multiplies).
template <typename Scalar>
GaussianMixture<Scalar> gm_product(const GaussianMixture<Scalar>& a,
                                   const GaussianMixture<Scalar>& b) {
    GaussianMixture<Scalar> out;
    out.components.reserve(a.size() * b.size());
    for (const auto& ca : a.components)
        for (const auto& cb : b.components) out.components.push_back(gauss_product(ca, cb));
    return out;
}

}  // namespace lrfs
