#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lrfs/assignment.hpp"
#include "lrfs/gaussian.hpp"
#include "lrfs/label.hpp"
#include "lrfs/lmb.hpp"
#include "lrfs/mdglmb.hpp"
#include "lrfs/sigma_points.hpp"

namespace lrfs {

template <typename Scalar>
Scalar wrap_angle(Scalar a) {
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    a = std::fmod(a, two_pi);
    if (a <= -std::numbers::pi_v<Scalar>) a += two_pi;
    if (a > std::numbers::pi_v<Scalar>) a -= two_pi;
    return a;
}

/// Linear motion model on the [x, vx, y, vy] state with survival probability.
template <typename Scalar = double>
struct MotionModel {
    Eigen::MatrixX<Scalar> transition;     // A
    Eigen::MatrixX<Scalar> process_noise;  // Q
    Scalar survival = Scalar(0.95);
    Scalar dt = Scalar(1);

    static MotionModel white_noise_acceleration(Scalar dt, Scalar q_pos, Scalar q_vel,
                                                Scalar survival) {
        MotionModel m;
        m.dt = dt;
        m.survival = survival;
        m.transition = Eigen::MatrixX<Scalar>::Identity(4, 4);
        m.transition(0, 1) = dt;
        m.transition(2, 3) = dt;
        m.process_noise = Eigen::MatrixX<Scalar>::Zero(4, 4);
        m.process_noise.diagonal() << q_pos, q_vel, q_pos, q_vel;
        return m;
    }
};

/// Range/bearing sensor with a circular field of view (infinite radius means
/// the whole surveillance region) and Poisson clutter uniform over it.
template <typename Scalar = double>
struct SensorModel {
    Eigen::Vector2<Scalar> position = Eigen::Vector2<Scalar>::Zero();
    Eigen::Matrix2<Scalar> noise = Eigen::Matrix2<Scalar>::Identity();  // diag(range, bearing)
    Scalar detection_prob = Scalar(0.98);
    Scalar fov_radius = std::numeric_limits<Scalar>::infinity();
    Scalar clutter_rate = Scalar(0);
    // surveillance region, used as the clutter region for unlimited FoVs
    Scalar region_xmin = Scalar(0), region_xmax = Scalar(0);
    Scalar region_ymin = Scalar(0), region_ymax = Scalar(0);

    [[nodiscard]] bool limited_fov() const { return std::isfinite(fov_radius); }

    [[nodiscard]] bool in_fov(const Eigen::Vector2<Scalar>& p) const {
        if (limited_fov()) return (p - position).norm() <= fov_radius;
        return p.x() >= region_xmin && p.x() <= region_xmax && p.y() >= region_ymin &&
               p.y() <= region_ymax;
    }

    [[nodiscard]] Scalar clutter_area() const {
        if (limited_fov()) return std::numbers::pi_v<Scalar> * fov_radius * fov_radius;
        return (region_xmax - region_xmin) * (region_ymax - region_ymin);
    }

    /// Range/bearing of a state's position component.
    [[nodiscard]] Eigen::Vector2<Scalar> measure(const Eigen::VectorX<Scalar>& state) const {
        const Scalar dx = state(0) - position.x();
        const Scalar dy = state(2) - position.y();
        Eigen::Vector2<Scalar> z;
        z << std::sqrt(dx * dx + dy * dy), std::atan2(dy, dx);
        return z;
    }

    /// Clutter intensity at a measurement: the position-space intensity
    /// clutter_rate / area, mapped through the polar Jacobian.
    [[nodiscard]] Scalar clutter_intensity(const Eigen::Vector2<Scalar>& z) const {
        const Scalar range = std::max(z(0), Scalar(1e-6));
        return clutter_rate / clutter_area() * range;
    }
};

template <typename Scalar = double>
struct BirthModel {
    Scalar existence = Scalar(0.01);
    Eigen::MatrixX<Scalar> cov;  // 4x4

    static BirthModel standard() {
        BirthModel b;
        b.cov = Eigen::MatrixX<Scalar>::Zero(4, 4);
        b.cov.diagonal() << Scalar(1600), Scalar(400), Scalar(1600), Scalar(400);
        return b;
    }
};

/// One Bernoulli birth per measurement: position remapped to the state
/// space, zero velocity prior, fixed birth existence, fresh (time, index)
/// label.
template <typename Scalar>
std::vector<BernoulliTrack<Scalar>> adaptive_birth(
    const std::vector<Eigen::Vector2<Scalar>>& measurements,
    const SensorModel<Scalar>& sensor, const BirthModel<Scalar>& birth, int time,
    int agent_id) {
    std::vector<BernoulliTrack<Scalar>> out;
    out.reserve(measurements.size());
    for (std::size_t i = 0; i < measurements.size(); ++i) {
        const Scalar range = measurements[i](0);
        const Scalar bearing = measurements[i](1);
        BernoulliTrack<Scalar> t;
        t.label = Label{time, static_cast<int>(i), agent_id};
        t.existence = birth.existence;
        Eigen::VectorX<Scalar> mean(4);
        mean << sensor.position.x() + range * std::cos(bearing), Scalar(0),
            sensor.position.y() + range * std::sin(bearing), Scalar(0);
        t.pdf = single_gaussian<Scalar>(Scalar(1), std::move(mean), birth.cov);
        out.push_back(std::move(t));
    }
    return out;
}

namespace detail {

template <typename Scalar>
Gaussian<Scalar> predict_component(const Gaussian<Scalar>& c, const MotionModel<Scalar>& m) {
    Gaussian<Scalar> out;
    out.weight = c.weight;
    out.mean = m.transition * c.mean;
    out.cov = m.transition * c.cov * m.transition.transpose() + m.process_noise;
    out.cov = Scalar(0.5) * (out.cov + out.cov.transpose()).eval();
    return out;
}

template <typename Scalar>
GaussianMixture<Scalar> predict_mixture(const GaussianMixture<Scalar>& mix,
                                        const MotionModel<Scalar>& m) {
    GaussianMixture<Scalar> out;
    out.components.reserve(mix.size());
    for (const auto& c : mix.components) out.components.push_back(predict_component(c, m));
    return out;
}

/// Unscented propagation of one component through the range/bearing map.
template <typename Scalar>
struct UtMeasurement {
    Eigen::Vector2<Scalar> predicted;
    Eigen::Matrix2<Scalar> innovation_cov;
    Eigen::MatrixX<Scalar> cross_cov;  // d x 2
};

template <typename Scalar>
UtMeasurement<Scalar> ut_measurement(const Gaussian<Scalar>& c,
                                     const SensorModel<Scalar>& sensor) {
    SigmaPoints<Scalar> sp = sigma_points(c.mean, c.cov);
    const Eigen::Index n = sp.weights.size();
    Eigen::MatrixX<Scalar> z(2, n);
    for (Eigen::Index s = 0; s < n; ++s) z.col(s) = sensor.measure(sp.points.col(s));

    // bearing mean through the embedding to keep wrap-around consistent
    Scalar sin_sum = Scalar(0), cos_sum = Scalar(0), range_mean = Scalar(0);
    for (Eigen::Index s = 0; s < n; ++s) {
        range_mean += sp.weights(s) * z(0, s);
        sin_sum += sp.weights(s) * std::sin(z(1, s));
        cos_sum += sp.weights(s) * std::cos(z(1, s));
    }
    UtMeasurement<Scalar> ut;
    ut.predicted << range_mean, std::atan2(sin_sum, cos_sum);

    ut.innovation_cov.setZero();
    ut.cross_cov = Eigen::MatrixX<Scalar>::Zero(c.mean.size(), 2);
    for (Eigen::Index s = 0; s < n; ++s) {
        Eigen::Vector2<Scalar> dz;
        dz << z(0, s) - ut.predicted(0), wrap_angle(z(1, s) - ut.predicted(1));
        ut.innovation_cov += sp.weights(s) * dz * dz.transpose();
        ut.cross_cov += sp.weights(s) * (sp.points.col(s) - c.mean) * dz.transpose();
    }
    ut.innovation_cov += sensor.noise;
    ut.innovation_cov = (Scalar(0.5) *
                         (ut.innovation_cov + ut.innovation_cov.transpose())).eval();
    return ut;
}

/// Per-track association summary against one measurement set.
template <typename Scalar>
struct TrackUpdateTable {
    Scalar detectable = Scalar(0);                        // P_d seen by this track
    std::vector<Scalar> likelihood;                       // g(z_j) per measurement
    std::vector<GaussianMixture<Scalar>> updated;         // posterior pdf per measurement
    std::vector<Scalar> gate_dist2;                       // min component distance
};

template <typename Scalar>
TrackUpdateTable<Scalar> build_update_table(
    const GaussianMixture<Scalar>& pdf, const SensorModel<Scalar>& sensor,
    const std::vector<Eigen::Vector2<Scalar>>& measurements) {
    TrackUpdateTable<Scalar> table;
    const Eigen::Index m = static_cast<Eigen::Index>(measurements.size());
    table.likelihood.assign(m, Scalar(0));
    table.updated.assign(m, GaussianMixture<Scalar>{});
    table.gate_dist2.assign(m, std::numeric_limits<Scalar>::infinity());

    std::vector<UtMeasurement<Scalar>> uts;
    uts.reserve(pdf.size());
    for (const auto& c : pdf.components) uts.push_back(ut_measurement(c, sensor));

    for (Eigen::Index j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < pdf.components.size(); ++k) {
            const auto& c = pdf.components[k];
            const auto& ut = uts[k];
            Eigen::Vector2<Scalar> dz;
            dz << measurements[j](0) - ut.predicted(0),
                wrap_angle(measurements[j](1) - ut.predicted(1));
            Eigen::LLT<Eigen::Matrix2<Scalar>> llt(ut.innovation_cov);
            if (llt.info() != Eigen::Success) continue;
            const Scalar dist2 = llt.matrixL().solve(dz).squaredNorm();
            table.gate_dist2[j] = std::min(table.gate_dist2[j], dist2);

            Eigen::VectorX<Scalar> mean2(2);
            mean2.setZero();
            Eigen::MatrixX<Scalar> cov2 = ut.innovation_cov;
            const Scalar like = c.weight * gauss_pdf<Scalar>(dz, mean2, cov2);
            table.likelihood[j] += like;

            Eigen::MatrixX<Scalar> gain =
                ut.cross_cov * llt.solve(Eigen::Matrix2<Scalar>::Identity());
            Gaussian<Scalar> upd;
            upd.weight = like;
            upd.mean = c.mean + gain * dz;
            upd.cov = c.cov - gain * ut.innovation_cov * gain.transpose();
            upd.cov = Scalar(0.5) * (upd.cov + upd.cov.transpose()).eval();
            table.updated[j].components.push_back(std::move(upd));
        }
        table.updated[j].normalize();
    }
    return table;
}

}  // namespace detail

struct UpdateParams {
    double gate_dist2 = 25.0;  // squared Mahalanobis gating threshold
    int max_events = 100;      // ranked association events per group/hypothesis
    GmReduceParams reduce;
};

struct UpdateDiagnostics {
    int rejected_measurements = 0;  // outside the sensor's clutter region
};

/// Survival-scaled prediction through the motion model, plus appended birth
/// tracks.
template <typename Scalar>
LmbDensity<Scalar> predict(const LmbDensity<Scalar>& density, const MotionModel<Scalar>& motion,
                           const std::vector<BernoulliTrack<Scalar>>& births) {
    LmbDensity<Scalar> out;
    out.label_space = density.label_space;
    for (const auto& t : density.tracks) {
        BernoulliTrack<Scalar> p;
        p.label = t.label;
        p.existence = motion.survival * t.existence;
        p.pdf = detail::predict_mixture(t.pdf, motion);
        out.add_track(std::move(p));
    }
    for (const auto& b : births) out.add_track(b);
    return out;
}

/// Grouped marginal-association measurement update. Tracks sharing gated
/// measurements form one association problem, solved by ranked assignment
/// over (measurement | missed | not present) options per track; posterior
/// existence and PDFs are the event marginals.
template <typename Scalar>
LmbDensity<Scalar> update(const LmbDensity<Scalar>& density, const SensorModel<Scalar>& sensor,
                          const std::vector<Eigen::Vector2<Scalar>>& measurements,
                          const UpdateParams& params = UpdateParams{},
                          UpdateDiagnostics* diag = nullptr) {
    const Scalar kInf = std::numeric_limits<Scalar>::infinity();

    std::vector<Eigen::Vector2<Scalar>> zs;
    zs.reserve(measurements.size());
    for (const auto& z : measurements) {
        Eigen::Vector2<Scalar> pos = sensor.position;
        pos.x() += z(0) * std::cos(z(1));
        pos.y() += z(0) * std::sin(z(1));
        if (!sensor.in_fov(pos)) {
            if (diag) ++diag->rejected_measurements;
            continue;
        }
        Eigen::Vector2<Scalar> w = z;
        w(1) = wrap_angle(w(1));
        zs.push_back(w);
    }

    const std::size_t n = density.tracks.size();
    std::vector<detail::TrackUpdateTable<Scalar>> tables(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& t = density.tracks[i];
        Eigen::Vector2<Scalar> pos;
        pos << t.pdf.components.front().mean(0), t.pdf.components.front().mean(2);
        const bool visible = sensor.in_fov(pos);
        tables[i] = detail::build_update_table(t.pdf, sensor, zs);
        tables[i].detectable = visible ? sensor.detection_prob : Scalar(0);
    }

    // group tracks connected through gated measurements
    std::vector<int> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<std::vector<int>> meas_tracks(zs.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (!(tables[i].detectable > Scalar(0))) continue;
        for (std::size_t j = 0; j < zs.size(); ++j)
            if (tables[i].gate_dist2[j] <= Scalar(params.gate_dist2))
                meas_tracks[j].push_back(static_cast<int>(i));
    }
    for (const auto& ts : meas_tracks)
        for (std::size_t k = 1; k < ts.size(); ++k) parent[find(ts[k])] = find(ts[0]);

    std::map<int, std::vector<int>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[find(static_cast<int>(i))].push_back(
        static_cast<int>(i));

    LmbDensity<Scalar> out;
    out.label_space = density.label_space;

    for (const auto& [root, track_ids] : groups) {
        std::vector<int> group_meas;
        for (std::size_t j = 0; j < zs.size(); ++j) {
            const auto& ts = meas_tracks[j];
            if (!ts.empty() && find(ts[0]) == root) group_meas.push_back(static_cast<int>(j));
        }

        const int g = static_cast<int>(track_ids.size());
        const int m = static_cast<int>(group_meas.size());
        // columns: group measurements | per-track missed | per-track absent
        Eigen::MatrixX<Scalar> cost(g, m + 2 * g);
        cost.setConstant(kInf);
        for (int a = 0; a < g; ++a) {
            const auto& t = density.tracks[track_ids[a]];
            const auto& table = tables[track_ids[a]];
            const Scalar pd = table.detectable;
            for (int b = 0; b < m; ++b) {
                const int j = group_meas[b];
                if (table.gate_dist2[j] > Scalar(params.gate_dist2)) continue;
                const Scalar kappa =
                    std::max(sensor.clutter_intensity(zs[j]), Scalar(1e-300));
                const Scalar w = t.existence * pd * table.likelihood[j] / kappa;
                cost(a, b) = w > Scalar(0) ? -std::log(w) : kInf;
            }
            const Scalar miss = t.existence * (Scalar(1) - pd);
            cost(a, m + 2 * a) = miss > Scalar(0) ? -std::log(miss) : kInf;
            const Scalar absent = Scalar(1) - t.existence;
            cost(a, m + 2 * a + 1) = absent > Scalar(0) ? -std::log(absent) : kInf;
        }

        auto events = murty_ranked(cost, params.max_events);
        if (events.empty())
            throw std::logic_error("update: no feasible association event");

        Scalar norm = Scalar(0);
        const Scalar shift = events.front().total;
        std::vector<Scalar> weight(events.size());
        for (std::size_t e = 0; e < events.size(); ++e) {
            weight[e] = std::exp(-(events[e].total - shift));
            norm += weight[e];
        }

        for (int a = 0; a < g; ++a) {
            const auto& prior = density.tracks[track_ids[a]];
            const auto& table = tables[track_ids[a]];
            Scalar exist = Scalar(0);
            GaussianMixture<Scalar> mix;
            for (std::size_t e = 0; e < events.size(); ++e) {
                const int col = events[e].row_to_col[a];
                const Scalar we = weight[e] / norm;
                if (col == m + 2 * a + 1) continue;  // absent
                exist += we;
                GaussianMixture<Scalar> part =
                    col < m ? table.updated[group_meas[col]] : prior.pdf;
                part.scale_weights(we);
                mix.components.insert(mix.components.end(), part.components.begin(),
                                      part.components.end());
            }
            if (!(exist > Scalar(0))) continue;
            BernoulliTrack<Scalar> post;
            post.label = prior.label;
            post.existence = std::min(exist, Scalar(1));
            mix.scale_weights(Scalar(1) / exist);
            post.pdf = gm_reduce(mix, params.reduce);
            out.add_track(std::move(post));
        }
    }
    return out;
}

/// Extract (label, state) for tracks whose existence clears the threshold;
/// the estimate is the mean of the heaviest component.
template <typename Scalar>
std::vector<std::pair<Label, Eigen::VectorX<Scalar>>> extract(
    const LmbDensity<Scalar>& density, Scalar threshold = Scalar(0.55)) {
    std::vector<std::pair<Label, Eigen::VectorX<Scalar>>> out;
    for (const auto& t : density.tracks) {
        if (!(t.existence > threshold) || t.pdf.empty()) continue;
        const Gaussian<Scalar>* best = &t.pdf.components.front();
        for (const auto& c : t.pdf.components)
            if (c.weight > best->weight) best = &c;
        out.emplace_back(t.label, best->mean);
    }
    return out;
}

template <typename Scalar>
std::vector<std::pair<Label, Eigen::VectorX<Scalar>>> extract(
    const MdglmbDensity<Scalar>& density, Scalar threshold = Scalar(0.55)) {
    return extract(mdglmb_to_lmb(density), threshold);
}

/// Hypothesis-table prediction: per prior hypothesis, ranked survival
/// subsets crossed with ranked birth subsets; resulting tables merged by
/// label set and truncated.
template <typename Scalar>
MdglmbDensity<Scalar> predict(const MdglmbDensity<Scalar>& density,
                              const MotionModel<Scalar>& motion,
                              const std::vector<BernoulliTrack<Scalar>>& births,
                              int max_hypotheses = 100, Scalar jep_floor = Scalar(1e-20)) {
    std::vector<Scalar> birth_probs;
    birth_probs.reserve(births.size());
    for (const auto& b : births) birth_probs.push_back(b.existence);
    const auto birth_subsets =
        k_best_bernoulli_subsets(birth_probs, std::max(4, max_hypotheses / 4));

    struct Acc {
        Scalar jep = Scalar(0);
        std::map<Label, GaussianMixture<Scalar>> mixes;
    };
    std::map<LabelSet, Acc> table;

    for (const auto& h : density.hypotheses) {
        if (!(h.jep > Scalar(0))) continue;
        std::map<Label, GaussianMixture<Scalar>> predicted;
        for (const auto& [l, mix] : h.pdfs) predicted[l] = detail::predict_mixture(mix, motion);

        std::vector<Scalar> survive(h.labels.size(), motion.survival);
        const auto survivor_subsets =
            k_best_bernoulli_subsets(survive, std::max(4, max_hypotheses / 4));

        for (const auto& ss : survivor_subsets) {
            if (!(ss.weight > Scalar(0))) continue;
            for (const auto& bs : birth_subsets) {
                const Scalar w = h.jep * ss.weight * bs.weight;
                if (!(w > Scalar(0))) continue;
                LabelSet set;
                for (std::size_t i = 0; i < h.labels.size(); ++i)
                    if (ss.include[i]) set.push_back(h.labels[i]);
                for (std::size_t i = 0; i < births.size(); ++i)
                    if (bs.include[i]) set.push_back(births[i].label);
                set = make_label_set(std::move(set));

                Acc& acc = table[set];
                acc.jep += w;
                for (std::size_t i = 0; i < h.labels.size(); ++i) {
                    if (!ss.include[i]) continue;
                    GaussianMixture<Scalar> part = predicted[h.labels[i]];
                    part.scale_weights(w);
                    auto& mix = acc.mixes[h.labels[i]];
                    mix.components.insert(mix.components.end(), part.components.begin(),
                                          part.components.end());
                }
                for (std::size_t i = 0; i < births.size(); ++i) {
                    if (!bs.include[i]) continue;
                    GaussianMixture<Scalar> part = births[i].pdf;
                    part.scale_weights(w);
                    auto& mix = acc.mixes[births[i].label];
                    mix.components.insert(mix.components.end(), part.components.begin(),
                                          part.components.end());
                }
            }
        }
    }

    MdglmbDensity<Scalar> out;
    out.label_space = density.label_space;
    for (const auto& b : births)
        out.label_space = set_union(out.label_space, {b.label});
    for (auto& [set, acc] : table) {
        if (!(acc.jep > Scalar(0))) continue;
        Hypothesis<Scalar> h;
        h.labels = set;
        h.jep = acc.jep;
        for (auto& [l, mix] : acc.mixes) {
            mix.scale_weights(Scalar(1) / acc.jep);
            h.pdfs[l] = std::move(mix);
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

/// Hypothesis-table measurement update: ranked label-to-measurement
/// assignments per hypothesis (budgeted by hypothesis weight), marginalized
/// back onto the unchanged label sets.
template <typename Scalar>
MdglmbDensity<Scalar> update(const MdglmbDensity<Scalar>& density,
                             const SensorModel<Scalar>& sensor,
                             const std::vector<Eigen::Vector2<Scalar>>& measurements,
                             const UpdateParams& params = UpdateParams{},
                             UpdateDiagnostics* diag = nullptr) {
    const Scalar kInf = std::numeric_limits<Scalar>::infinity();

    std::vector<Eigen::Vector2<Scalar>> zs;
    for (const auto& z : measurements) {
        Eigen::Vector2<Scalar> pos = sensor.position;
        pos.x() += z(0) * std::cos(z(1));
        pos.y() += z(0) * std::sin(z(1));
        if (!sensor.in_fov(pos)) {
            if (diag) ++diag->rejected_measurements;
            continue;
        }
        Eigen::Vector2<Scalar> w = z;
        w(1) = wrap_angle(w(1));
        zs.push_back(w);
    }
    const int m = static_cast<int>(zs.size());

    // per-label update tables shared across hypotheses
    std::map<Label, detail::TrackUpdateTable<Scalar>> tables;
    for (const auto& h : density.hypotheses)
        for (const auto& [l, mix] : h.pdfs)
            if (!tables.count(l)) {
                auto table = detail::build_update_table(mix, sensor, zs);
                Eigen::Vector2<Scalar> pos;
                pos << mix.components.front().mean(0), mix.components.front().mean(2);
                table.detectable = sensor.in_fov(pos) ? sensor.detection_prob : Scalar(0);
                tables[l] = std::move(table);
            }

    MdglmbDensity<Scalar> out;
    out.label_space = density.label_space;
    std::vector<Scalar> log_jep;  // posterior weights kept in log space

    for (const auto& h : density.hypotheses) {
        if (!(h.jep > Scalar(0))) continue;
        const int g = static_cast<int>(h.labels.size());
        Hypothesis<Scalar> post;
        post.labels = h.labels;

        if (g == 0) {
            post.jep = Scalar(0);
            log_jep.push_back(std::log(h.jep));
            out.hypotheses.push_back(std::move(post));
            continue;
        }

        Eigen::MatrixX<Scalar> cost(g, m + g);
        cost.setConstant(kInf);
        for (int a = 0; a < g; ++a) {
            const auto& table = tables.at(h.labels[a]);
            const Scalar pd = table.detectable;
            for (int j = 0; j < m; ++j) {
                if (table.gate_dist2[j] > Scalar(params.gate_dist2)) continue;
                const Scalar kappa =
                    std::max(sensor.clutter_intensity(zs[j]), Scalar(1e-300));
                const Scalar w = pd * table.likelihood[j] / kappa;
                cost(a, j) = w > Scalar(0) ? -std::log(w) : kInf;
            }
            const Scalar miss = Scalar(1) - pd;
            cost(a, m + a) = miss > Scalar(0) ? -std::log(miss) : kInf;
        }

        const int budget = std::max(
            1, static_cast<int>(std::ceil(params.max_events * h.jep)));
        auto events = murty_ranked(cost, std::min(budget, params.max_events));
        if (events.empty()) continue;  // no feasible association: hypothesis dies

        const Scalar shift = events.front().total;
        Scalar total = Scalar(0);
        std::vector<Scalar> weight(events.size());
        for (std::size_t e = 0; e < events.size(); ++e) {
            weight[e] = std::exp(-(events[e].total - shift));
            total += weight[e];
        }

        post.jep = Scalar(0);
        log_jep.push_back(std::log(h.jep) + std::log(total) - shift);
        for (int a = 0; a < g; ++a) {
            const Label& l = h.labels[a];
            const auto& table = tables.at(l);
            GaussianMixture<Scalar> mix;
            for (std::size_t e = 0; e < events.size(); ++e) {
                const int col = events[e].row_to_col[a];
                GaussianMixture<Scalar> part =
                    col < m ? table.updated[col] : h.pdfs.at(l);
                part.scale_weights(weight[e] / total);
                mix.components.insert(mix.components.end(), part.components.begin(),
                                      part.components.end());
            }
            post.pdfs[l] = gm_reduce(mix, params.reduce);
        }
        out.hypotheses.push_back(std::move(post));
    }

    if (!log_jep.empty()) {
        const Scalar top = *std::max_element(log_jep.begin(), log_jep.end());
        Scalar mass = Scalar(0);
        for (std::size_t i = 0; i < log_jep.size(); ++i) {
            out.hypotheses[i].jep = std::exp(log_jep[i] - top);
            mass += out.hypotheses[i].jep;
        }
        for (auto& h : out.hypotheses) h.jep /= mass;
    }
    out.sort_hypotheses();
    return out;
}

}  // namespace lrfs
