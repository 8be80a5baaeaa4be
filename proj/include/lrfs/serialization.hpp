#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "lrfs/fov.hpp"
#include "lrfs/gaussian.hpp"
#include "lrfs/label.hpp"
#include "lrfs/label_match.hpp"
#include "lrfs/lmb.hpp"
#include "lrfs/mdglmb.hpp"

namespace lrfs {

// JSON schema (documented in the README):
//   label    -> [birth_time, birth_index, agent_id]
//   gaussian -> {"w": ..., "mean": [...], "cov": [[...], ...]}  (row-major)
//   lmb      -> {"type": "lmb", "label_space": [label...],
//                "tracks": [{"label": label, "canonical_id"?: int,
//                            "r": ..., "pdf": [gaussian...]}]}
//   mdglmb   -> {"type": "mdglmb", "label_space": [label...],
//                "hypotheses": [{"labels": [label...], "jep": ...,
//                                "pdfs": [[gaussian...] per label]}]}
// Hypotheses are ordered by descending jep, ties by label set.

nlohmann::json to_json(const Label& l);
Label label_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GaussianMixture<double>& mix);
GaussianMixture<double> mixture_from_json(const nlohmann::json& j);

nlohmann::json to_json(const LmbDensity<double>& density);
LmbDensity<double> lmb_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MdglmbDensity<double>& density);
MdglmbDensity<double> mdglmb_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SubspacePartition& partition);
SubspacePartition partition_from_json(const nlohmann::json& j);

nlohmann::json to_json(const LabelMap& map);

/// Parse a density file of either family; LMB inputs are exposed through
/// both accessors (expanded on demand).
struct DensityFile {
    bool is_lmb = false;
    LmbDensity<double> lmb;
    MdglmbDensity<double> mdglmb;
};
DensityFile density_from_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace lrfs
