#include "dcg/corpus.hpp"
#include "dcg/errors.hpp"
#include "dcg/weighting.hpp"
#include "support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

using namespace dcg;

namespace {

DocumentTermMatrix from_dense(const Eigen::MatrixXd& d) {
    SparseCounts m = d.sparseView();
    return DocumentTermMatrix(std::move(m));
}

FeatureMatrix dense_features(const Eigen::MatrixXd& v) {
    FeatureMatrix f;
    f.values = v;
    f.kind = FeatureKind::Raw;
    return f;
}

// tf-idf written out term by term from the definition.
Eigen::MatrixXd tfidf_oracle(const Eigen::MatrixXd& tf) {
    const auto d = static_cast<double>(tf.rows());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(tf.rows(), tf.cols());
    for (Eigen::Index c = 0; c < tf.cols(); ++c) {
        int containing = 0;
        for (Eigen::Index r = 0; r < tf.rows(); ++r) {
            containing += tf(r, c) > 0 ? 1 : 0;
        }
        if (containing == 0) {
            continue;
        }
        for (Eigen::Index r = 0; r < tf.rows(); ++r) {
            out(r, c) = tf(r, c) * std::log(d / containing);
        }
    }
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        double ss = 0.0;
        for (Eigen::Index c = 0; c < out.cols(); ++c) {
            ss += out(r, c) * out(r, c);
        }
        if (ss > 0.0) {
            out.row(r) /= std::sqrt(ss);
        }
    }
    return out;
}

} // namespace

TEST_CASE("tfidf: a term in every document weighs zero") {
    Eigen::MatrixXd tf(2, 2);
    tf << 1, 0,
          1, 1;
    const auto f = tfidf(from_dense(tf));
    CHECK(f.values(0, 0) == 0.0);
    CHECK(f.values(1, 0) == 0.0);
    // Pre-normalization row 1 is (0, log 2); normalized it becomes (0, 1).
    CHECK(f.values(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.values(0, 1) == 0.0);
    CHECK(f.kind == FeatureKind::Tfidf);
    CHECK(f.row_normalized);
}

TEST_CASE("tfidf: matches the direct formula on random count matrices") {
    test::Rand rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd tf = Eigen::MatrixXd::Zero(6, 10);
        for (int r = 0; r < 6; ++r) {
            for (int c = 0; c < 10; ++c) {
                if (rng.unit() < 0.4) {
                    tf(r, c) = static_cast<double>(1 + rng.below(5));
                }
            }
        }
        tf(0, 0) = 1.0;
        const auto f = tfidf(from_dense(tf));
        CHECK((f.values - tfidf_oracle(tf)).cwiseAbs().maxCoeff() <= 1e-12);
        for (Eigen::Index r = 0; r < f.values.rows(); ++r) {
            const double norm = f.values.row(r).norm();
            CHECK((norm == 0.0 || std::abs(norm - 1.0) <= 1e-9));
        }
    }
}

TEST_CASE("tfidf: all-empty corpus is rejected") {
    CHECK_THROWS_AS(tfidf(DocumentTermMatrix(SparseCounts(2, 2))), InvalidArgument);
}

TEST_CASE("lsa: identity input is reconstructed at full rank") {
    const auto r = lsa_decompose(dense_features(Eigen::MatrixXd::Identity(3, 3)), 3);
    const Eigen::MatrixXd back = r.left * r.singular_values.asDiagonal() * r.right.transpose();
    CHECK((back - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("lsa: rank-one input is exact at k=1") {
    Eigen::VectorXd u(4);
    u << 1, 2, 0.5, 3;
    Eigen::VectorXd v(3);
    v << 0.2, 1, 4;
    const Eigen::MatrixXd m = u * v.transpose();
    const auto r = lsa_decompose(dense_features(m), 1);
    const Eigen::MatrixXd back = r.left * r.singular_values.asDiagonal() * r.right.transpose();
    CHECK((back - m).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("lsa: projection agrees with an eigendecomposition of M^T M up to column sign") {
    test::Rand rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd m(8, 5);
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            m.data()[i] = rng.unit() * 2.0 - 1.0;
        }
        const auto proj = lsa_project(dense_features(m), 2);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.transpose() * m);
        // Eigenvalues ascend; the last two columns are the leading right singular vectors.
        for (int c = 0; c < 2; ++c) {
            const Eigen::VectorXd v = eig.eigenvectors().col(4 - c);
            const Eigen::VectorXd oracle = m * v; // U_k Sigma_k column = M v
            const Eigen::VectorXd got = proj.values.col(c);
            const double same = (got - oracle).cwiseAbs().maxCoeff();
            const double flipped = (got + oracle).cwiseAbs().maxCoeff();
            CHECK(std::min(same, flipped) <= 1e-8);
        }
    }
}

TEST_CASE("lsa: largest-magnitude entry of each left vector is positive") {
    test::Rand rng(9);
    Eigen::MatrixXd m(6, 4);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = rng.unit() - 0.5;
    }
    const auto r = lsa_decompose(dense_features(m), 3);
    for (Eigen::Index c = 0; c < 3; ++c) {
        Eigen::Index pivot = 0;
        r.left.col(c).cwiseAbs().maxCoeff(&pivot);
        CHECK(r.left(pivot, c) > 0.0);
    }
    CHECK(r.coordinates.kind == FeatureKind::Lsa);
    CHECK(r.coordinates.n_dims() == 3);
}

TEST_CASE("lsa: rank outside 1..min(n, d) is rejected") {
    const auto f = dense_features(Eigen::MatrixXd::Identity(3, 3));
    CHECK_THROWS_AS(lsa_project(f, 0), InvalidArgument);
    CHECK_THROWS_AS(lsa_project(f, 4), InvalidArgument);
}

TEST_CASE("feature matrices round-trip through text") {
    Eigen::MatrixXd tf(3, 4);
    tf << 1, 0, 2, 0,
          0, 3, 1, 0,
          1, 1, 0, 5;
    const auto f = tfidf(from_dense(tf));
    std::stringstream buf;
    write_features(buf, f);
    const auto back = read_features(buf);
    CHECK(back.values == f.values);
    CHECK(back.kind == f.kind);
    CHECK(back.row_normalized == f.row_normalized);
    CHECK(back.provenance == f.provenance);

    std::istringstream bad("dcg-features 2 2 tfidf 1 ab\n1 2\n3\n");
    CHECK_THROWS_AS(read_features(bad), ParseError);
}

TEST_CASE("provenance depends on the input matrix") {
    Eigen::MatrixXd a(2, 2);
    a << 1, 0,
         0, 1;
    Eigen::MatrixXd b = a;
    b(0, 1) = 1;
    CHECK(tfidf(from_dense(a)).provenance == tfidf(from_dense(a)).provenance);
    CHECK(tfidf(from_dense(a)).provenance != tfidf(from_dense(b)).provenance);
}
