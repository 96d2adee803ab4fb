#include <doctest.h>

#include <cmath>

#include "pfedeg/errors.hpp"
#include "pfedeg/relation_graph.hpp"
#include "test_support.hpp"

using namespace pfedeg;
using testing::make_kg;
using testing::random_matrix;

TEST_CASE("weights_ratio: hand Jaccard for the overlapping pair") {
    const auto reg = build_registry(
        {make_kg(0, {"a", "b", "c"}, {"r"}), make_kg(1, {"b", "c", "d"}, {"q"})});
    const Matrix raw = weights_ratio(reg);
    CHECK(raw(0, 1) == doctest::Approx(0.5));
    CHECK(raw(1, 0) == doctest::Approx(0.5));
    CHECK(raw(0, 0) == doctest::Approx(0.5));  // min over the single other client
}

TEST_CASE("weights_ratio: identical vocabularies give off-diagonal 1") {
    const auto reg =
        build_registry({make_kg(0, {"a", "b"}, {"r"}), make_kg(1, {"a", "b"}, {"q"})});
    const Matrix raw = weights_ratio(reg);
    CHECK(raw(0, 1) == doctest::Approx(1.0));
    CHECK(raw(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("weights_ratio: the min rule can zero a self-weight") {
    // client 0 shares nothing with client 2
    const auto reg = build_registry({make_kg(0, {"a", "b"}, {"r"}),
                                     make_kg(1, {"b", "c"}, {"q"}),
                                     make_kg(2, {"c", "d"}, {"s"})});
    const Matrix raw = weights_ratio(reg);
    CHECK(raw(0, 2) == 0.0);
    CHECK(raw(0, 0) == 0.0);  // min(W_01, W_02) = min(1/3, 0)
    CHECK(raw(0, 1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("weights_ratio: single client degenerates to [[1]]") {
    const auto reg = build_registry({make_kg(0, {"a"}, {"r"})});
    const Matrix raw = weights_ratio(reg);
    CHECK(raw.rows() == 1);
    CHECK(raw(0, 0) == 1.0);
}

TEST_CASE("weights_ratio: permutation equivariance and [0,1] range") {
    const auto a = make_kg(0, {"a", "b", "c", "d"}, {"r"});
    const auto b = make_kg(1, {"c", "d", "e"}, {"q"});
    const auto c = make_kg(2, {"a", "e", "f"}, {"s"});
    const Matrix w = weights_ratio(build_registry({a, b, c}));

    auto relabel = [](ClientKG kg, int id) {
        kg.client_id = id;
        return kg;
    };
    const Matrix w_perm =
        weights_ratio(build_registry({relabel(c, 0), relabel(a, 1), relabel(b, 2)}));
    // permutation (c,a,b): new index 0 <- old 2, 1 <- old 0, 2 <- old 1
    const int perm[3] = {2, 0, 1};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(w_perm(i, j) == doctest::Approx(w(perm[i], perm[j])));
            CHECK(w(i, j) >= 0.0);
            CHECK(w(i, j) <= 1.0);
        }
}

TEST_CASE("embedding_affinity: identical, orthogonal and zero-norm rows") {
    Matrix a(3, 4), b(3, 4);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j) a(i, j) = b(i, j) = (i + 1) * 0.3 + j;
    CHECK(embedding_affinity(a, b) == doctest::Approx(3.0 * std::exp(1.0)).epsilon(1e-12));

    Matrix u(2, 2), v(2, 2);
    u(0, 0) = 1.0;
    v(0, 1) = 2.0;  // orthogonal
    u(1, 1) = 3.0;
    v(1, 0) = 0.5;  // orthogonal
    CHECK(embedding_affinity(u, v) == doctest::Approx(2.0));

    Matrix z(1, 2), w(1, 2);
    w(0, 0) = 1.0;  // z row has zero norm -> cos := 0 -> contributes 1
    CHECK(embedding_affinity(z, w) == doctest::Approx(1.0));
}

TEST_CASE("embedding_affinity: cosine is scale-invariant per row pair") {
    Rng rng(derive_seed(31, Stream::Test));
    for (int iter = 0; iter < 25; ++iter) {
        const Matrix a = random_matrix(4, 6, rng);
        const Matrix b = random_matrix(4, 6, rng);
        Matrix a2 = a, b2 = b;
        for (std::size_t k = 0; k < 4; ++k) {
            const double scale = rng.uniform(0.1, 10.0);
            for (std::size_t d = 0; d < 6; ++d) {
                a2(k, d) *= scale;
                b2(k, d) *= scale;
            }
        }
        CHECK(embedding_affinity(a2, b2) ==
              doctest::Approx(embedding_affinity(a, b)).epsilon(1e-9));
    }
}

TEST_CASE("weights_embedding: diagonal is e^{-1}, disjoint pairs are 0") {
    const auto reg = build_registry({make_kg(0, {"a", "b"}, {"r"}),
                                     make_kg(1, {"b", "c"}, {"q"}),
                                     make_kg(2, {"x", "y"}, {"s"})});
    Rng rng(derive_seed(32, Stream::Test));
    const std::vector<Matrix> entities = {random_matrix(2, 4, rng), random_matrix(2, 4, rng),
                                          random_matrix(2, 4, rng)};
    const Matrix raw = weights_embedding(reg, entities);
    for (int i = 0; i < 3; ++i) CHECK(raw(i, i) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(raw(0, 2) == 0.0);
    CHECK(raw(2, 0) == 0.0);
    CHECK(raw(0, 1) == raw(1, 0));
    CHECK(raw(0, 1) > 0.0);
}

TEST_CASE("weights_embedding: shared rows are aligned by entity") {
    // client 0 = {a, b}; client 1 = {b, c}: the shared block is only b.
    const auto reg =
        build_registry({make_kg(0, {"a", "b"}, {"r"}), make_kg(1, {"b", "c"}, {"q"})});
    Matrix e0(2, 2), e1(2, 2);
    // local order: client 0 has a=0, b=1; client 1 has b=0, c=1
    e0(1, 0) = 1.0;  // b in client 0
    e1(0, 0) = 1.0;  // b in client 1: identical -> cos 1
    const Matrix raw = weights_embedding(reg, {e0, e1});
    CHECK(raw(0, 1) == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("scale_rows: hand rows and the zero-row fallback") {
    Matrix raw(3, 3);
    raw(0, 0) = 1;
    raw(0, 1) = 1;
    raw(0, 2) = 2;
    raw(1, 0) = 0.7;
    raw(1, 1) = 0.7;
    // row 2 all zero
    const Matrix w = scale_rows(raw);
    CHECK(w(0, 0) == doctest::Approx(0.25));
    CHECK(w(0, 1) == doctest::Approx(0.25));
    CHECK(w(0, 2) == doctest::Approx(0.5));
    CHECK(w(1, 0) == doctest::Approx(0.5));
    CHECK(w(1, 1) == doctest::Approx(0.5));
    CHECK(w(2, 2) == 1.0);  // one-hot diagonal
    CHECK(w(2, 0) == 0.0);
    CHECK_THROWS_AS(scale_rows([] {
                        Matrix bad(1, 2);
                        bad(0, 0) = -1;
                        return bad;
                    }()),
                    InvalidInputError);
}

TEST_CASE("scale_rows: row-stochastic on random nonnegative matrices") {
    Rng rng(derive_seed(33, Stream::Test));
    for (int iter = 0; iter < 200; ++iter) {
        const std::size_t C = 1 + rng.below(8);
        Matrix raw(C, C);
        for (std::size_t i = 0; i < raw.size(); ++i)
            raw.data()[i] = rng.next_double() < 0.15 ? 0.0 : rng.uniform(0.0, 5.0);
        const Matrix w = scale_rows(raw);
        for (std::size_t i = 0; i < C; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < C; ++j) {
                CHECK(w(i, j) >= 0.0);
                CHECK(w(i, j) <= 1.0);
                sum += w(i, j);
            }
            CHECK(std::fabs(sum - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("weights_uniform: 1/C everywhere") {
    const Matrix w2 = weights_uniform(2);
    CHECK(w2(0, 0) == 0.5);
    CHECK(w2(1, 0) == 0.5);
    const Matrix w1 = weights_uniform(1);
    CHECK(w1(0, 0) == 1.0);
    for (std::size_t C : {3u, 7u}) {
        const Matrix w = weights_uniform(C);
        for (std::size_t i = 0; i < C; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < C; ++j) sum += w(i, j);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("compute_weights: ratio pipeline floors the self-weight before scaling") {
    // client 0 shares nothing with client 2, so its raw self-weight is 0
    const auto reg = build_registry({make_kg(0, {"a", "b"}, {"r"}),
                                     make_kg(1, {"b", "c"}, {"q"}),
                                     make_kg(2, {"c", "d"}, {"s"})});
    const Matrix w = compute_weights(WeightStrategy::RatioBased, reg, {});
    CHECK(w(0, 0) > 0.0);  // the floor keeps a trace of self
    double sum = 0.0;
    for (std::size_t j = 0; j < 3; ++j) sum += w(0, j);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}
