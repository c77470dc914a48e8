#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace dcg::test {

/// Small deterministic generator for property tests.
class Rand {
public:
    explicit Rand(std::uint64_t seed) : eng_(seed) {}

    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    std::size_t below(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

    std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }

    /// Symmetric nonnegative matrix with zero diagonal; each pair is an edge with probability `density`.
    Eigen::MatrixXd symmetric(std::size_t n, double density) {
        const auto m = static_cast<Eigen::Index>(n);
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = i + 1; j < m; ++j) {
                if (unit() < density) {
                    w(i, j) = w(j, i) = unit();
                }
            }
        }
        return w;
    }

    std::vector<int> labels(std::size_t n, int classes) {
        std::vector<int> out(n);
        for (auto& l : out) {
            l = static_cast<int>(below(static_cast<std::size_t>(classes)));
        }
        return out;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace dcg::test
