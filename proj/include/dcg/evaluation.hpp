#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace dcg {

/// Counts of documents per (predicted cluster, true class), with the distinct ids of each side.
struct Contingency {
    std::vector<int> cluster_ids; ///< ascending
    std::vector<int> class_ids;   ///< ascending
    std::vector<std::vector<long>> counts; ///< [cluster][class]
    std::size_t n = 0;
};

struct EvalReport {
    double ac = 0.0;
    double nmi = 0.0;
    std::size_t matches = 0;
    std::size_t n = 0;
    std::map<int, int> mapping; ///< cluster id -> class id
    Contingency contingency;
};

Contingency contingency_table(std::span<const int> pred, std::span<const int> truth);

/// Minimum-cost perfect assignment on a square cost matrix; returns column of each row.
std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost);

/// Injective cluster -> class map maximizing matched documents. Clusters left without a
/// class map to fresh ids above the largest class id.
std::map<int, int> best_map(std::span<const int> pred, std::span<const int> truth);

double accuracy(std::span<const int> pred, std::span<const int> truth);

/// Mutual information (log base 2) normalized by the larger entropy. Both sides single-class
/// gives 1; exactly one side single-class gives 0.
double nmi(std::span<const int> pred, std::span<const int> truth);

EvalReport evaluate(std::span<const int> pred, std::span<const int> truth);

} // namespace dcg
