#include "dcg/dominant_sets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace dcg {

namespace {

std::vector<Eigen::Index> as_index(std::span<const std::size_t> nodes) {
    return std::vector<Eigen::Index>(nodes.begin(), nodes.end());
}

DominantSet singleton(std::size_t node) {
    DominantSet d;
    d.members = {node};
    d.weights = {1.0};
    d.cohesiveness = 0.0;
    d.support_threshold = 0.1;
    return d;
}

// Converged payoffs of supported nodes sit within this many tol of x'Ax.
constexpr double kPayoffSlack = 10.0;

/// Checks the payoff condition on x restricted to its support, which is what the caller reports.
bool payoffs_balanced(const Eigen::MatrixXd& sub, const Eigen::VectorXd& x, double threshold, double slack) {
    const Eigen::VectorXd y = (x.array() > threshold).select(x, 0.0);
    const Eigen::VectorXd ay = sub * (y / y.sum());
    const double f = (y / y.sum()).dot(ay);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (y(i) > 0.0 && std::abs(ay(i) - f) > slack) {
            return false;
        }
    }
    return true;
}

/// Connected components of the supported nodes, each in ascending local index order.
std::vector<std::vector<Eigen::Index>> support_components(const Eigen::MatrixXd& sub, const Eigen::VectorXd& x,
                                                          double threshold) {
    const Eigen::Index n = x.size();
    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<Eigen::Index>> parts;
    for (Eigen::Index s = 0; s < n; ++s) {
        if (!(x(s) > threshold) || comp[static_cast<std::size_t>(s)] >= 0) {
            continue;
        }
        const int id = static_cast<int>(parts.size());
        std::vector<Eigen::Index> stack{s};
        std::vector<Eigen::Index> members;
        comp[static_cast<std::size_t>(s)] = id;
        while (!stack.empty()) {
            const Eigen::Index v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (Eigen::Index u = 0; u < n; ++u) {
                if (x(u) > threshold && comp[static_cast<std::size_t>(u)] < 0 && sub(v, u) > 0.0) {
                    comp[static_cast<std::size_t>(u)] = id;
                    stack.push_back(u);
                }
            }
        }
        std::sort(members.begin(), members.end());
        parts.push_back(std::move(members));
    }
    return parts;
}

/// Part whose renormalized restriction of x is most cohesive; the earliest part wins ties.
const std::vector<Eigen::Index>& best_component(const Eigen::MatrixXd& sub, const Eigen::VectorXd& x,
                                                const std::vector<std::vector<Eigen::Index>>& parts) {
    std::size_t best = 0;
    double best_f = -1.0;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        Eigen::VectorXd y = x(parts[p]);
        y /= y.sum();
        const double f = cohesiveness(sub(parts[p], parts[p]), y);
        if (f > best_f) {
            best_f = f;
            best = p;
        }
    }
    return parts[best];
}

/// Full-size start putting 9/10 of the mass on `part` (in the proportions of x) and the rest
/// uniformly over every active node.
Eigen::VectorXd restart_near(const Eigen::VectorXd& x, const std::vector<Eigen::Index>& part,
                             const std::vector<Eigen::Index>& live, Eigen::Index m) {
    Eigen::VectorXd start = Eigen::VectorXd::Constant(m, 0.1 / static_cast<double>(m));
    double mass = 0.0;
    for (Eigen::Index i : part) {
        mass += x(i);
    }
    for (Eigen::Index i : part) {
        start(live[static_cast<std::size_t>(i)]) += 0.9 * x(i) / mass;
    }
    return start;
}

} // namespace

double cohesiveness(const Eigen::MatrixXd& a, const Eigen::VectorXd& x) {
    return x.dot(a * x);
}

Eigen::VectorXd simplex_replicator_step(const Eigen::MatrixXd& a, const Eigen::VectorXd& x) {
    const Eigen::VectorXd ax = a * x;
    const double f = x.dot(ax);
    Eigen::VectorXd next = x.cwiseProduct(ax) / f;
    next /= next.sum();
    return next;
}

DominantSet extract_dominant_set(const SimilarityGraph& a, std::span<const std::size_t> active,
                                 const DominantSetConfig& cfg) {
    if (active.empty()) {
        throw InvalidArgument("extract_dominant_set: empty active set");
    }
    for (std::size_t v : active) {
        if (v >= a.size()) {
            throw InvalidArgument("extract_dominant_set: node " + std::to_string(v) + " outside graph");
        }
    }
    if (active.size() == 1) {
        return singleton(active[0]);
    }
    const auto m = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd sub = a.weights(as_index(active), as_index(active));
    Eigen::VectorXd x = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    if (!(cohesiveness(sub, x) > 0.0)) {
        throw NoCohesiveStructure("no cohesive structure among " + std::to_string(m) + " active nodes");
    }

    // Components that decay below kExtinct are set to zero, which the dynamics preserve; once
    // enough of them die the iteration continues on the compacted submatrix.
    constexpr double kExtinct = 1e-20;
    std::vector<Eigen::Index> live(static_cast<std::size_t>(m));
    std::iota(live.begin(), live.end(), Eigen::Index{0});

    DominantSet out;
    out.converged = false;
    out.support_threshold = 1.0 / (10.0 * static_cast<double>(m));
    const double slack = kPayoffSlack * cfg.tol;
    std::size_t it = 0;
    Eigen::VectorXd ax(m);
    Eigen::VectorXd next(m);
    while (it < cfg.max_iters) {
        ax.noalias() = sub * x;
        next = x.cwiseProduct(ax) / x.dot(ax);
        next /= next.sum();
        ++it;
        const double change = (next - x).lpNorm<1>();
        x.swap(next);
        if (change < cfg.tol) {
            if (payoffs_balanced(sub, x, out.support_threshold, slack)) {
                const auto parts = support_components(sub, x, out.support_threshold);
                if (parts.size() <= 1) {
                    out.converged = true;
                    break;
                }
                // Disconnected supports are saddle points (typically reached from a symmetric
                // start); restart close to the most cohesive part.
                x = restart_near(x, best_component(sub, x, parts), live, m);
                sub = a.weights(as_index(active), as_index(active));
                live.resize(static_cast<std::size_t>(m));
                std::iota(live.begin(), live.end(), Eigen::Index{0});
                ax.resize(m);
                next.resize(m);
                continue;
            }
        }
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (x(i) >= kExtinct) {
                keep.push_back(i);
            }
        }
        if (keep.size() * 4 <= static_cast<std::size_t>(x.size()) * 3) {
            sub = Eigen::MatrixXd(sub(keep, keep));
            x = Eigen::VectorXd(x(keep));
            x /= x.sum();
            std::vector<Eigen::Index> still;
            for (Eigen::Index i : keep) {
                still.push_back(live[static_cast<std::size_t>(i)]);
            }
            live = std::move(still);
            ax.resize(x.size());
            next.resize(x.size());
        }
    }
    out.iterations = it;
    out.cohesiveness = cohesiveness(sub, x);
    std::vector<std::pair<std::size_t, double>> support;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x(i) > out.support_threshold) {
            support.emplace_back(active[static_cast<std::size_t>(live[static_cast<std::size_t>(i)])], x(i));
        }
    }
    std::sort(support.begin(), support.end());
    for (const auto& [node, w] : support) {
        out.members.push_back(node);
        out.weights.push_back(w);
    }
    return out;
}

SeedClustering peel_off(const SimilarityGraph& a, StopRule stop, const DominantSetConfig& cfg) {
    if (!(a.weights.array() >= 0.0).all()) {
        throw InvalidArgument("peel_off: graph weights must be nonnegative");
    }
    if (stop.mode == StopRule::Mode::FirstK && stop.k == 0) {
        throw InvalidArgument("peel_off: K must be >= 1");
    }
    std::vector<std::size_t> remaining(a.size());
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});

    SeedClustering out;
    const bool exhaustive = stop.mode == StopRule::Mode::Exhaustive;
    auto flush_singletons = [&] {
        for (std::size_t v : remaining) {
            out.clusters.push_back(singleton(v));
        }
        remaining.clear();
    };

    while (!remaining.empty()) {
        if (!exhaustive && out.clusters.size() == stop.k) {
            break;
        }
        DominantSet ds;
        try {
            ds = extract_dominant_set(a, remaining, cfg);
        } catch (const NoCohesiveStructure&) {
            if (exhaustive) {
                flush_singletons();
                break;
            }
            throw NoCohesiveStructure("peel_off: found only " + std::to_string(out.clusters.size()) + " of " +
                                      std::to_string(stop.k) + " requested clusters");
        }
        if (exhaustive && remaining.size() > 1 && ds.cohesiveness < cfg.min_cohesiveness) {
            flush_singletons();
            break;
        }
        std::vector<std::size_t> rest;
        rest.reserve(remaining.size());
        std::set_difference(remaining.begin(), remaining.end(), ds.members.begin(), ds.members.end(),
                            std::back_inserter(rest));
        remaining = std::move(rest);
        out.clusters.push_back(std::move(ds));
    }
    if (!exhaustive && out.clusters.size() < stop.k) {
        throw NoCohesiveStructure("peel_off: found only " + std::to_string(out.clusters.size()) + " of " +
                                  std::to_string(stop.k) + " requested clusters");
    }
    out.residual = std::move(remaining);
    return out;
}

double cluster_similarity(std::span<const std::size_t> ci, std::span<const std::size_t> cj, const SimilarityGraph& s) {
    if (ci.empty() || cj.empty()) {
        throw InvalidArgument("cluster_similarity: clusters must be nonempty");
    }
    double total = 0.0;
    for (std::size_t r : ci) {
        for (std::size_t t : cj) {
            if (r == t) {
                throw InvalidArgument("cluster_similarity: clusters share node " + std::to_string(r));
            }
            total += s.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t));
        }
    }
    return total / static_cast<double>(ci.size() + cj.size());
}

} // namespace dcg
