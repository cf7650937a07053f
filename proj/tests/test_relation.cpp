#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "omegasketch/errors.hpp"
#include "omegasketch/relation.hpp"
#include "support.hpp"

using namespace osk;

namespace {

oracle::Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0, 1);
    oracle::Matrix m(r, std::vector<double>(c));
    for (auto& row : m)
        for (auto& v : row) v = u(rng);
    return m;
}

}  // namespace

TEST_CASE("composition matches the reference sup-tensor product") {
    std::mt19937_64 rng(11);
    for (const auto& s : oracle::scalars()) {
        auto alg = oracle::algebra_of(s.name);
        for (int trial = 0; trial < 100; ++trial) {
            std::size_t na = 1 + trial % 3, nb = 1 + trial % 4, nc = 1 + trial % 2;
            auto A = OmegaSet::crisp(oracle::support(na), alg, "A");
            auto B = OmegaSet::crisp(oracle::support(nb), alg, "B");
            auto C = OmegaSet::crisp(oracle::support(nc), alg, "C");
            auto mf = random_matrix(na, nb, rng), mg = random_matrix(nb, nc, rng);
            auto f = oracle::morphism(mf, A, B, "a", "b", alg);
            auto g = oracle::morphism(mg, B, C, "b", "c", alg);
            auto fg = compose(f, g);
            CHECK(fg.sources() == std::vector<std::string>{"a"});
            CHECK(fg.targets() == std::vector<std::string>{"c"});
            CHECK(oracle::max_diff(oracle::matrix(fg, "a", "c"), oracle::compose(mf, mg, s.tensor)) < 1e-12);
        }
    }
}

TEST_CASE("hand-computed Goedel composition") {
    auto alg = Algebra::goedel();
    auto A = OmegaSet::crisp({"0", "1"}, alg, "A");
    auto f = oracle::morphism({{0.2, 0.9}, {0.6, 0.1}}, A, A, "x", "y", alg);
    auto g = oracle::morphism({{0.5, 0.3}, {0.7, 0.4}}, A, A, "y", "z", alg);
    auto fg = oracle::matrix(compose(f, g), "x", "z");
    CHECK(fg[0][0] == doctest::Approx(0.7));
    CHECK(fg[0][1] == doctest::Approx(0.4));
    CHECK(fg[1][0] == doctest::Approx(0.5));
    CHECK(fg[1][1] == doctest::Approx(0.3));
}

TEST_CASE("composition of disjoint relations is a product in either order") {
    auto alg = Algebra::product_tnorm();
    auto A = OmegaSet::crisp({"0", "1"}, alg, "A");
    auto f = oracle::morphism({{0.2, 0.9}, {0.6, 0.1}}, A, A, "a", "b", alg);
    auto g = oracle::morphism({{0.5, 0.3}, {0.7, 0.4}}, A, A, "p", "q", alg);
    auto fg = compose(f, g);
    auto gf = compose(g, f);
    CHECK(fg.rank() == 4);
    CHECK(approx_equal(fg, gf));
}

TEST_CASE("converse, identity and associativity laws on random instances") {
    std::mt19937_64 rng(5);
    for (const auto& s : oracle::scalars()) {
        auto alg = oracle::algebra_of(s.name);
        for (int trial = 0; trial < 50; ++trial) {
            auto A = OmegaSet::crisp(oracle::support(2 + trial % 2), alg, "A");
            auto B = OmegaSet::crisp(oracle::support(1 + trial % 3), alg, "B");
            auto C = OmegaSet::crisp(oracle::support(2), alg, "C");
            auto D = OmegaSet::crisp(oracle::support(3), alg, "D");
            auto f = oracle::morphism(random_matrix(A.size(), B.size(), rng), A, B, "a", "b", alg);
            auto g = oracle::morphism(random_matrix(B.size(), C.size(), rng), B, C, "b", "c", alg);
            auto h = oracle::morphism(random_matrix(C.size(), D.size(), rng), C, D, "c", "d", alg);
            CHECK(approx_equal(transpose(compose(f, g)), compose(transpose(g), transpose(f))));
            CHECK(approx_equal(compose(compose(f, g), h), compose(f, compose(g, h))));
            auto id = identity(A, "x", "a");
            CHECK(oracle::max_diff(oracle::matrix(compose(id, f), "x", "b"), oracle::matrix(f, "a", "b")) < 1e-12);
        }
    }
}

TEST_CASE("total and faithful follow row and column suprema") {
    auto alg = Algebra::goedel();
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        auto tf = oracle::random_total_faithful(3, 4, rng);
        auto A = oracle::diagonal_set("A", tf.row_extent, alg);
        auto B = oracle::diagonal_set("B", tf.col_extent, alg);
        auto f = oracle::morphism(tf.m, A, B, "a", "b", alg);
        CHECK(is_total(f));
        CHECK(is_faithful(f));
        auto g = tf;
        g.m[0][0] = 0;
        g.m[0][1] = 0;
        g.m[0][2] = 0;
        g.m[0][3] = 0;
        if (tf.row_extent[0] > 0) CHECK_FALSE(is_total(oracle::morphism(g.m, A, B, "a", "b", alg)));
    }
}

TEST_CASE("identity and similarity classify as isomorphisms") {
    auto alg = Algebra::lukasiewicz();
    auto A = OmegaSet::from_rows("A", {"0", "1", "2"}, {{1.0, 0.5, 0.0}, {0.5, 1.0, 0.5}, {0.0, 0.5, 1.0}}, alg);
    auto c = classify(identity(A, "x", "y"));
    CHECK(c.epi);
    CHECK(c.mono);
    CHECK(c.iso);
    auto s = classify(similarity_morphism(A, "x", "y"));
    CHECK(s.iso);
}

TEST_CASE("pointwise connectives join on shared attribute names") {
    auto alg = Algebra::product_tnorm();
    auto A = OmegaSet::crisp({"0", "1"}, alg, "A");
    auto f = MultiMorphism::tabulate("f", {{"x", A}}, {"x"}, {}, alg,
                                     [](std::span<const std::size_t> i) { return TruthValue(i[0] ? 0.5 : 1.0); });
    auto g = MultiMorphism::tabulate("g", {{"x", A}, {"y", A}}, {"x"}, {"y"}, alg,
                                     [](std::span<const std::size_t> i) { return TruthValue(0.5 + 0.25 * i[1]); });
    auto m = pointwise(f, g, Connective::tensor);
    CHECK(m.rank() == 2);
    CHECK(m.at({1, 1}).scalar() == doctest::Approx(0.375));
    std::vector<std::string> drop{"y"};
    CHECK(marginalize(m, drop).at({0}).scalar() == doctest::Approx(0.75));
}

TEST_CASE("cell guard and shape errors") {
    auto alg = Algebra::goedel();
    auto A = OmegaSet::crisp(oracle::support(10), alg, "A");
    std::vector<Attribute> many;
    for (int i = 0; i < 4; ++i) many.push_back({"a" + std::to_string(i), A});
    auto f = MultiMorphism::constant("f", many, {}, {}, alg.top(), alg);
    std::vector<Attribute> more;
    for (int i = 0; i < 4; ++i) more.push_back({"b" + std::to_string(i), A});
    auto g = MultiMorphism::constant("g", more, {}, {}, alg.top(), alg);
    CHECK_THROWS_AS(pointwise(f, g, Connective::tensor, 1000), CapacityError);
    CHECK_THROWS_AS(MultiMorphism("h", alg, {{"x", A}}, {"x"}, {}, {alg.top()}), ShapeError);
}

TEST_CASE("independence is detected by factorisation") {
    auto alg = Algebra::product_tnorm();
    auto A = OmegaSet::crisp({"0", "1"}, alg, "A");
    auto f = oracle::morphism({{1.0, 0.5}, {0.5, 1.0}}, A, A, "a", "b", alg);
    auto g = oracle::morphism({{1.0, 0.25}, {0.25, 1.0}}, A, A, "c", "d", alg);
    CHECK(independent(f, g).independent);
}
