#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "redash/errors.hpp"
#include "redash/model.hpp"

namespace redash {

struct AllComponents {
    friend bool operator==(const AllComponents&, const AllComponents&) = default;
};

/// ALL, or an explicit set of component ids within one document.
using Selection = std::variant<AllComponents, std::set<std::string>>;

inline Selection select_all() { return AllComponents{}; }
inline Selection select_ids(std::set<std::string> ids) { return ids; }

/// ALL yields every non-placeholder component; explicit ids yield exactly
/// those components. Both in reading order.
inline std::vector<Component> resolve_selection(const DashboardDoc& doc, const Selection& sel) {
    std::vector<Component> out;
    if (std::holds_alternative<AllComponents>(sel)) {
        for (const auto& c : doc.components)
            if (!c.placeholder) out.push_back(c);
    } else {
        for (const auto& id : std::get<std::set<std::string>>(sel)) {
            const auto* c = doc.find(id);
            if (!c) throw NotFound("unknown component id " + id);
            out.push_back(*c);
        }
    }
    sort_reading_order(out);
    return out;
}

struct MatchPair {
    std::string sourceId;
    std::string targetId;
    double score{0};

    friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

struct ScoreWeights {
    double type{0.7};
    double size{0.3};
    double sameKind{1.0};
    double chartSubtypeMismatch{0.6};
};

inline double type_score(const ComponentKind& a, const ComponentKind& b, const ScoreWeights& w = {}) {
    if (a == b) return w.sameKind;
    if (a.is_chart() && b.is_chart()) return w.chartSubtypeMismatch;
    return 0.0;
}

inline double size_score(const BoundingBox& a, const BoundingBox& b) {
    const double sa = a.area();
    const double sb = b.area();
    const double hi = std::max(sa, sb);
    if (hi <= 0) return 0.0;
    return std::min(sa, sb) / hi;
}

/// Type dominates; cross-family pairs score exactly zero.
inline double pair_score(const Component& source, const Component& target, const ScoreWeights& w = {}) {
    const double t = type_score(source.kind, target.kind, w);
    if (t == 0.0) return 0.0;
    return w.type * t + w.size * size_score(source.bbox, target.bbox);
}

namespace detail {

/// Maximum-weight assignment on a dense rows x cols matrix of non-negative
/// weights (Hungarian algorithm, O(n^3) on the padded square). Returns the
/// column assigned to each row; -1 for padding.
inline std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& w, std::size_t cols) {
    const std::size_t rows = w.size();
    const std::size_t n = std::max(rows, cols);
    if (n == 0) return {};
    double maxw = 0;
    for (const auto& r : w)
        for (double v : r) maxw = std::max(maxw, v);
    auto cost = [&](std::size_t i, std::size_t j) {
        const double v = (i < rows && j < cols) ? w[i][j] : 0.0;
        return maxw - v;
    };
    constexpr double kInf = std::numeric_limits<double>::infinity();
    // 1-based potentials u (rows), v (cols); p[j] = row matched to column j.
    std::vector<double> u(n + 1, 0), v(n + 1, 0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> rowToCol(rows, -1);
    for (std::size_t j = 1; j <= n; ++j)
        if (p[j] >= 1 && p[j] <= rows && j <= cols) rowToCol[p[j] - 1] = static_cast<int>(j - 1);
    return rowToCol;
}

/// Best total over the free rows/columns; zero-weight cells count as
/// "unmatched" so they add nothing.
inline double best_total(const std::vector<std::vector<double>>& w, const std::vector<char>& rowFree,
                         const std::vector<char>& colFree) {
    std::vector<std::size_t> rs, cs;
    for (std::size_t i = 0; i < rowFree.size(); ++i)
        if (rowFree[i]) rs.push_back(i);
    for (std::size_t j = 0; j < colFree.size(); ++j)
        if (colFree[j]) cs.push_back(j);
    if (rs.empty() || cs.empty()) return 0.0;
    std::vector<std::vector<double>> sub(rs.size(), std::vector<double>(cs.size()));
    for (std::size_t a = 0; a < rs.size(); ++a)
        for (std::size_t b = 0; b < cs.size(); ++b) sub[a][b] = w[rs[a]][cs[b]];
    const auto assign = max_weight_assignment(sub, cs.size());
    double total = 0;
    for (std::size_t a = 0; a < assign.size(); ++a)
        if (assign[a] >= 0) total += sub[a][static_cast<std::size_t>(assign[a])];
    return total;
}

}  // namespace detail

inline constexpr double kScoreTieEpsilon = 1e-9;

/// Maximum-total-score matching over pairs with score > 0. Among optimal
/// matchings, picks the lexicographically smallest list of
/// (target index, source index) pairs, indices in reading order: each target
/// in turn takes the earliest source that still admits an optimal completion,
/// or stays unmatched if none does.
inline std::vector<MatchPair> match_components(const std::vector<Component>& sourcesIn,
                                               const std::vector<Component>& targetsIn,
                                               const ScoreWeights& weights = {}) {
    auto sources = sourcesIn;
    auto targets = targetsIn;
    sort_reading_order(sources);
    sort_reading_order(targets);
    const std::size_t nt = targets.size();
    const std::size_t ns = sources.size();
    if (nt == 0 || ns == 0) return {};

    // rows = targets, cols = sources
    std::vector<std::vector<double>> w(nt, std::vector<double>(ns));
    for (std::size_t t = 0; t < nt; ++t)
        for (std::size_t s = 0; s < ns; ++s) w[t][s] = pair_score(sources[s], targets[t], weights);

    std::vector<char> rowFree(nt, 1), colFree(ns, 1);
    double remaining = detail::best_total(w, rowFree, colFree);
    std::vector<MatchPair> pairs;
    for (std::size_t t = 0; t < nt; ++t) {
        rowFree[t] = 0;
        bool placed = false;
        for (std::size_t s = 0; s < ns && !placed; ++s) {
            if (!colFree[s] || w[t][s] <= 0) continue;
            colFree[s] = 0;
            const double rest = detail::best_total(w, rowFree, colFree);
            if (w[t][s] + rest >= remaining - kScoreTieEpsilon) {
                pairs.push_back({sources[s].id, targets[t].id, w[t][s]});
                remaining = rest;
                placed = true;
            } else {
                colFree[s] = 1;
            }
        }
        if (!placed) remaining = detail::best_total(w, rowFree, colFree);
    }
    return pairs;
}

inline double total_score(const std::vector<MatchPair>& pairs) {
    double t = 0;
    for (const auto& p : pairs) t += p.score;
    return t;
}

}  // namespace redash
