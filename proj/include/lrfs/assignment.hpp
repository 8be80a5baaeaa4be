#pragma once

#include <Eigen/Dense>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace lrfs {

template <typename Scalar = double>
struct LapResult {
    std::vector<int> row_to_col;
    Scalar total = Scalar(0);
    bool feasible = true;
};

/// Minimum-cost perfect matching on a square cost matrix (shortest
/// augmenting path with potentials, O(n^3)). Entries may be +infinity to
/// forbid a pairing; if no finite perfect matching exists the result is
/// flagged infeasible.
template <typename Scalar>
LapResult<Scalar> solve_lap(const Eigen::MatrixX<Scalar>& cost) {
    const int n = static_cast<int>(cost.rows());
    if (cost.cols() != n) throw std::invalid_argument("solve_lap: matrix not square");
    const Scalar kInf = std::numeric_limits<Scalar>::infinity();

    std::vector<Scalar> u(n + 1, Scalar(0)), v(n + 1, Scalar(0));
    std::vector<int> match(n + 1, 0);  // match[col] = row (1-based), 0 = free
    std::vector<int> way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<Scalar> minv(n + 1, kInf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = match[j0];
            int j1 = -1;
            Scalar delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const Scalar c = cost(i0 - 1, j - 1);
                if (c < kInf) {
                    const Scalar cur = c - u[i0] - v[j];
                    if (cur < minv[j]) {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if (j1 < 0 || !(delta < kInf)) {
                LapResult<Scalar> bad;
                bad.feasible = false;
                bad.total = kInf;
                return bad;
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    LapResult<Scalar> res;
    res.row_to_col.assign(n, -1);
    for (int j = 1; j <= n; ++j)
        if (match[j] > 0) res.row_to_col[match[j] - 1] = j - 1;
    res.total = Scalar(0);
    for (int i = 0; i < n; ++i) res.total += cost(i, res.row_to_col[i]);
    return res;
}

template <typename Scalar = double>
struct RankedAssignment {
    std::vector<int> row_to_col;  // over the real rows only
    Scalar total = Scalar(0);
};

/// K best assignments for a rectangular problem: every one of the m rows is
/// assigned to a distinct column (m <= cols). Branching follows the classic
/// partition scheme over real row-column pairs, so each row assignment is
/// enumerated once. Columns beyond the row count stay optional through
/// zero-cost padding rows.
template <typename Scalar>
std::vector<RankedAssignment<Scalar>> murty_ranked(const Eigen::MatrixX<Scalar>& cost,
                                                   int k) {
    const int m = static_cast<int>(cost.rows());
    const int n = static_cast<int>(cost.cols());
    if (m > n) throw std::invalid_argument("murty_ranked: more rows than columns");
    const Scalar kInf = std::numeric_limits<Scalar>::infinity();

    Eigen::MatrixX<Scalar> padded = Eigen::MatrixX<Scalar>::Zero(n, n);
    padded.topRows(m) = cost;

    struct Node {
        Eigen::MatrixX<Scalar> matrix;
        std::vector<int> solution;
        Scalar total;
        int branch_from;  // children branch on real rows >= this index
    };
    auto cmp = [](const Node& a, const Node& b) { return a.total > b.total; };
    std::priority_queue<Node, std::vector<Node>, decltype(cmp)> heap(cmp);

    auto push_if_feasible = [&](Eigen::MatrixX<Scalar> matrix, int branch_from) {
        LapResult<Scalar> lap = solve_lap(matrix);
        if (!lap.feasible || !(lap.total < kInf)) return;
        heap.push(Node{std::move(matrix), std::move(lap.row_to_col), lap.total, branch_from});
    };
    push_if_feasible(padded, 0);

    std::vector<RankedAssignment<Scalar>> out;
    while (!heap.empty() && static_cast<int>(out.size()) < k) {
        Node node = heap.top();
        heap.pop();
        RankedAssignment<Scalar> ra;
        ra.row_to_col.assign(node.solution.begin(), node.solution.begin() + m);
        ra.total = node.total;
        out.push_back(std::move(ra));

        for (int t = node.branch_from; t < m; ++t) {
            Eigen::MatrixX<Scalar> child = node.matrix;
            // force rows branch_from..t-1 to the popped assignment
            for (int i = node.branch_from; i < t; ++i) {
                const int j = node.solution[i];
                for (int jj = 0; jj < n; ++jj)
                    if (jj != j) child(i, jj) = kInf;
            }
            // forbid row t's popped column
            child(t, node.solution[t]) = kInf;
            push_if_feasible(std::move(child), t);
        }
    }
    return out;
}

template <typename Scalar = double>
struct WeightedSubset {
    std::vector<bool> include;
    Scalar weight = Scalar(0);
};

/// K heaviest subsets of independent Bernoulli items, where a subset T has
/// weight prod_{i in T} p_i * prod_{i not in T} (1 - p_i). Best-first search
/// over flip sets relative to the modal subset.
template <typename Scalar>
std::vector<WeightedSubset<Scalar>> k_best_bernoulli_subsets(
    const std::vector<Scalar>& probs, int k) {
    const std::size_t n = probs.size();
    std::vector<bool> base(n);
    Scalar base_weight = Scalar(1);
    std::vector<std::pair<Scalar, std::size_t>> flips;  // (ratio <= 1, item)
    for (std::size_t i = 0; i < n; ++i) {
        const Scalar p = probs[i];
        base[i] = p >= Scalar(0.5);
        base_weight *= base[i] ? p : (Scalar(1) - p);
        const Scalar kept = base[i] ? p : (Scalar(1) - p);
        const Scalar other = base[i] ? (Scalar(1) - p) : p;
        flips.emplace_back(kept > Scalar(0) ? other / kept : Scalar(0), i);
    }
    std::sort(flips.begin(), flips.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    struct Node {
        Scalar product;
        std::size_t last;            // index into flips of the largest member
        std::vector<std::size_t> members;
    };
    auto cmp = [](const Node& a, const Node& b) { return a.product < b.product; };
    std::priority_queue<Node, std::vector<Node>, decltype(cmp)> heap(cmp);

    std::vector<WeightedSubset<Scalar>> out;
    out.push_back({base, base_weight});
    if (!flips.empty() && k > 1)
        heap.push(Node{flips[0].first, 0, {0}});

    while (!heap.empty() && static_cast<int>(out.size()) < k) {
        Node node = heap.top();
        heap.pop();
        std::vector<bool> subset = base;
        for (std::size_t f : node.members) subset[flips[f].second] = !subset[flips[f].second];
        out.push_back({std::move(subset), base_weight * node.product});

        if (node.last + 1 < flips.size()) {
            const Scalar next_ratio = flips[node.last + 1].first;
            Node grow = node;  // add the next flip
            grow.product = node.product * next_ratio;
            grow.last = node.last + 1;
            grow.members.push_back(grow.last);
            heap.push(std::move(grow));

            Node swap = node;  // replace the last flip by the next one
            const Scalar last_ratio = flips[node.last].first;
            if (last_ratio > Scalar(0)) {
                swap.product = node.product / last_ratio * next_ratio;
                swap.members.back() = node.last + 1;
                swap.last = node.last + 1;
                heap.push(std::move(swap));
            }
        }
    }
    return out;
}

}  // namespace lrfs
