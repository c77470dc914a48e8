#include "dcg/evaluation.hpp"

#include "dcg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dcg {

namespace {

void check_lengths(std::span<const int> pred, std::span<const int> truth) {
    if (pred.size() != truth.size()) {
        throw InvalidArgument("evaluation: prediction length " + std::to_string(pred.size()) +
                              " differs from ground-truth length " + std::to_string(truth.size()));
    }
    if (pred.empty()) {
        throw InvalidArgument("evaluation: empty labelings");
    }
}

std::vector<int> distinct(std::span<const int> v) {
    std::vector<int> out(v.begin(), v.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::size_t index_of(const std::vector<int>& sorted, int v) {
    return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
}

struct Matching {
    std::map<int, int> mapping;
    std::size_t matches = 0;
};

Matching match(const Contingency& t) {
    const std::size_t rows = t.cluster_ids.size();
    const std::size_t cols = t.class_ids.size();
    const std::size_t dim = std::max(rows, cols);
    std::vector<std::vector<double>> cost(dim, std::vector<double>(dim, 0.0));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            cost[r][c] = -static_cast<double>(t.counts[r][c]);
        }
    }
    const auto assign = hungarian(cost);
    Matching m;
    int fresh = t.class_ids.back() + 1;
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t c = assign[r];
        if (c < cols) {
            m.mapping[t.cluster_ids[r]] = t.class_ids[c];
            m.matches += static_cast<std::size_t>(t.counts[r][c]);
        } else {
            m.mapping[t.cluster_ids[r]] = fresh++;
        }
    }
    return m;
}

double entropy_bits(const std::vector<long>& counts, double n) {
    double h = 0.0;
    for (long c : counts) {
        if (c > 0) {
            const double p = static_cast<double>(c) / n;
            h -= p * std::log2(p);
        }
    }
    return h;
}

} // namespace

Contingency contingency_table(std::span<const int> pred, std::span<const int> truth) {
    check_lengths(pred, truth);
    Contingency t;
    t.cluster_ids = distinct(pred);
    t.class_ids = distinct(truth);
    t.n = pred.size();
    t.counts.assign(t.cluster_ids.size(), std::vector<long>(t.class_ids.size(), 0));
    for (std::size_t i = 0; i < pred.size(); ++i) {
        ++t.counts[index_of(t.cluster_ids, pred[i])][index_of(t.class_ids, truth[i])];
    }
    return t;
}

// Shortest augmenting path with row/column potentials, O(n^3).
std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    for (const auto& row : cost) {
        if (row.size() != n) {
            throw InvalidArgument("hungarian: cost matrix must be square");
        }
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0);
    std::vector<double> v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0);   // column -> row (1-based, 0 = free)
    std::vector<std::size_t> way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
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
        } while (j0 != 0);
    }
    std::vector<std::size_t> assign(n, 0);
    for (std::size_t j = 1; j <= n; ++j) {
        if (p[j] != 0) {
            assign[p[j] - 1] = j - 1;
        }
    }
    return assign;
}

std::map<int, int> best_map(std::span<const int> pred, std::span<const int> truth) {
    return match(contingency_table(pred, truth)).mapping;
}

double accuracy(std::span<const int> pred, std::span<const int> truth) {
    const auto t = contingency_table(pred, truth);
    return static_cast<double>(match(t).matches) / static_cast<double>(t.n);
}

double nmi(std::span<const int> pred, std::span<const int> truth) {
    const auto t = contingency_table(pred, truth);
    const bool pred_single = t.cluster_ids.size() == 1;
    const bool truth_single = t.class_ids.size() == 1;
    if (pred_single && truth_single) {
        return 1.0;
    }
    if (pred_single || truth_single) {
        return 0.0;
    }
    const auto n = static_cast<double>(t.n);
    std::vector<long> row_sums(t.cluster_ids.size(), 0);
    std::vector<long> col_sums(t.class_ids.size(), 0);
    for (std::size_t r = 0; r < row_sums.size(); ++r) {
        for (std::size_t c = 0; c < col_sums.size(); ++c) {
            row_sums[r] += t.counts[r][c];
            col_sums[c] += t.counts[r][c];
        }
    }
    double mi = 0.0;
    for (std::size_t r = 0; r < row_sums.size(); ++r) {
        for (std::size_t c = 0; c < col_sums.size(); ++c) {
            const long joint = t.counts[r][c];
            if (joint == 0) {
                continue;
            }
            // p(r,c) / (p(r) p(c)) = joint * n / (row * col)
            mi += (static_cast<double>(joint) / n) *
                  std::log2(static_cast<double>(joint) * n /
                            (static_cast<double>(row_sums[r]) * static_cast<double>(col_sums[c])));
        }
    }
    const double denom = std::max(entropy_bits(row_sums, n), entropy_bits(col_sums, n));
    return std::clamp(mi / denom, 0.0, 1.0);
}

EvalReport evaluate(std::span<const int> pred, std::span<const int> truth) {
    EvalReport r;
    r.contingency = contingency_table(pred, truth);
    const auto m = match(r.contingency);
    r.mapping = m.mapping;
    r.matches = m.matches;
    r.n = r.contingency.n;
    r.ac = static_cast<double>(m.matches) / static_cast<double>(r.n);
    r.nmi = nmi(pred, truth);
    return r;
}

} // namespace dcg
