#pragma once

#include <algorithm>
#include <compare>
#include <ostream>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace lrfs {

/// Track label: (birth_time, birth_index, agent_id) identifies a track within
/// one agent's density. canonical_id is assigned by label matching; matched
/// labels across agents are rewritten to a shared representative, so ordinary
/// comparison works on canonicalized densities.
struct Label {
    int birth_time = 0;
    int birth_index = 0;
    int agent_id = 0;
    int canonical_id = -1;  // -1 = not yet matched

    [[nodiscard]] std::tuple<int, int, int> key() const {
        return {birth_time, birth_index, agent_id};
    }

    friend bool operator==(const Label& a, const Label& b) { return a.key() == b.key(); }
    friend std::strong_ordering operator<=>(const Label& a, const Label& b) {
        return a.key() <=> b.key();
    }
};

inline std::ostream& operator<<(std::ostream& os, const Label& l) {
    os << "(" << l.birth_time << "," << l.birth_index << "," << l.agent_id;
    if (l.canonical_id >= 0) os << "#" << l.canonical_id;
    return os << ")";
}

/// A set of labels, stored sorted and duplicate-free.
using LabelSet = std::vector<Label>;

inline LabelSet make_label_set(LabelSet labels) {
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return labels;
}

inline bool contains(const LabelSet& set, const Label& l) {
    return std::binary_search(set.begin(), set.end(), l);
}

inline bool is_subset(const LabelSet& a, const LabelSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline LabelSet set_union(const LabelSet& a, const LabelSet& b) {
    LabelSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline LabelSet set_intersection(const LabelSet& a, const LabelSet& b) {
    LabelSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline LabelSet set_difference(const LabelSet& a, const LabelSet& b) {
    LabelSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

/// All subsets of `space` (2^n of them), each sorted. Throws if n exceeds
/// `cap`; subset-explicit representations are meant for small label spaces.
inline std::vector<LabelSet> enumerate_subsets(const LabelSet& space, int cap = 12) {
    if (static_cast<int>(space.size()) > cap)
        throw std::invalid_argument("enumeration too large");
    const std::size_t n = space.size();
    std::vector<LabelSet> out;
    out.reserve(std::size_t{1} << n);
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        LabelSet s;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t{1} << i)) s.push_back(space[i]);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace lrfs
