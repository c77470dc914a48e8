#include "dcg/errors.hpp"
#include "dcg/evaluation.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace dcg;

namespace {

using Labels = std::vector<int>;

Labels relabel(const Labels& v, const std::vector<int>& perm) {
    Labels out;
    for (int x : v) {
        out.push_back(perm[static_cast<std::size_t>(x)]);
    }
    return out;
}

} // namespace

TEST_CASE("best map: relabeling, partial matching and identity") {
    const Labels a{0, 0, 1, 1};
    const Labels b{1, 1, 0, 0};
    const auto m = best_map(a, b);
    CHECK(m.at(0) == 1);
    CHECK(m.at(1) == 0);
    CHECK(evaluate(a, b).matches == 4);

    const Labels p{0, 1, 2};
    const Labels t{0, 0, 1};
    CHECK(evaluate(p, t).matches == 2);
    const auto surplus = best_map(p, t);
    CHECK(surplus.size() == 3);
    // The unmatched cluster maps to a fresh id above every class id.
    int fresh = 0;
    for (const auto& [c, cls] : surplus) {
        fresh += cls > 1 ? 1 : 0;
    }
    CHECK(fresh == 1);

    const Labels same{2, 0, 1, 1};
    for (const auto& [c, cls] : best_map(same, same)) {
        CHECK(c == cls);
    }
}

TEST_CASE("accuracy and nmi: hand-evaluated examples") {
    CHECK(accuracy(Labels{0, 0, 1, 1}, Labels{1, 1, 0, 0}) == 1.0);
    CHECK(accuracy(Labels{0, 0, 1, 1}, Labels{0, 1, 0, 1}) == 0.5);
    CHECK(nmi(Labels{0, 0, 1, 1}, Labels{0, 1, 0, 1}) == 0.0);
    CHECK(nmi(Labels{0, 1, 2, 0}, Labels{0, 1, 2, 0}) == doctest::Approx(1.0).epsilon(1e-12));
    // Product contingency: every cluster holds each class in the same proportion.
    CHECK(std::abs(nmi(Labels{0, 0, 0, 0, 1, 1, 1, 1}, Labels{0, 1, 2, 2, 0, 1, 2, 2})) <= 1e-12);
}

TEST_CASE("single-class conventions") {
    CHECK(nmi(Labels{0, 0, 0}, Labels{1, 1, 1}) == 1.0);
    CHECK(nmi(Labels{0, 0, 0}, Labels{0, 1, 1}) == 0.0);
    CHECK(nmi(Labels{0, 1, 1}, Labels{0, 0, 0}) == 0.0);
    CHECK(accuracy(Labels{4, 4}, Labels{0, 0}) == 1.0);
}

TEST_CASE("hungarian: small square cost matrices") {
    const std::vector<std::vector<double>> cost{{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
    const auto col = hungarian(cost);
    double total = 0.0;
    for (std::size_t r = 0; r < col.size(); ++r) {
        total += cost[r][col[r]];
    }
    CHECK(total == 5.0);
}

TEST_CASE("contingency table counts") {
    const auto t = contingency_table(Labels{0, 0, 1, 5}, Labels{2, 3, 3, 3});
    CHECK(t.cluster_ids == Labels{0, 1, 5});
    CHECK(t.class_ids == Labels{2, 3});
    CHECK(t.counts[0] == std::vector<long>{1, 1});
    CHECK(t.counts[2] == std::vector<long>{0, 1});
    CHECK(t.n == 4);
    CHECK_THROWS_AS(contingency_table(Labels{0}, Labels{0, 1}), InvalidArgument);
}

TEST_CASE("metrics agree with factorial and direct-summation oracles on random labelings") {
    test::Rand rng(83);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = rng.between(1, 8);
        const auto p = rng.labels(n, static_cast<int>(rng.between(1, 4)));
        const auto t = rng.labels(n, static_cast<int>(rng.between(1, 4)));
        const auto r = evaluate(p, t);
        CHECK(std::abs(r.ac - test::brute_force_accuracy(p, t)) <= 1e-12);
        CHECK(std::abs(r.nmi - test::direct_nmi(p, t)) <= 1e-12);
        CHECK(r.ac * static_cast<double>(r.n) == doctest::Approx(static_cast<double>(r.matches)));
        CHECK(r.nmi >= 0.0);
        CHECK(r.nmi <= 1.0 + 1e-9);
    }
}

TEST_CASE("metrics are invariant under relabeling and nmi is symmetric") {
    test::Rand rng(89);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = rng.between(2, 12);
        const auto p = rng.labels(n, 4);
        const auto t = rng.labels(n, 4);
        std::vector<int> perm{7, 3, 0, 5};
        std::swap(perm[rng.below(4)], perm[rng.below(4)]);
        CHECK(accuracy(relabel(p, perm), t) == accuracy(p, t));
        CHECK(accuracy(p, relabel(t, perm)) == accuracy(p, t));
        CHECK(std::abs(nmi(relabel(p, perm), t) - nmi(p, t)) <= 1e-12);
        CHECK(std::abs(nmi(p, relabel(t, perm)) - nmi(p, t)) <= 1e-12);
        CHECK(std::abs(nmi(p, t) - nmi(t, p)) <= 1e-12);
        CHECK(accuracy(relabel(t, perm), t) == 1.0);
    }
}

TEST_CASE("accuracy is 1 exactly when the prediction is a relabeling of the truth") {
    for (std::size_t n = 1; n <= 5; ++n) {
        const auto all = test::all_labelings(n, 3);
        for (const auto& p : all) {
            for (const auto& t : all) {
                // Relabeling iff the contingency table has one nonzero per row and column.
                const auto c = contingency_table(p, t);
                bool bijective = c.cluster_ids.size() == c.class_ids.size();
                for (const auto& row : c.counts) {
                    bijective = bijective && std::count_if(row.begin(), row.end(), [](long v) { return v > 0; }) == 1;
                }
                CHECK((accuracy(p, t) == 1.0) == bijective);
            }
        }
    }
}
