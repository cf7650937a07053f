#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "omegasketch/consistency.hpp"
#include "omegasketch/errors.hpp"
#include "support.hpp"

using namespace osk;

namespace {

// Concepts over X = {a, b} valued in the three-element Lukasiewicz chain.
const Algebra chain3 = Algebra::lukasiewicz_chain(3);
const OmegaSet X = OmegaSet::crisp({"a", "b"}, chain3, "X");

MultiMorphism concept_of(const std::string& name, double a, double b) {
    return MultiMorphism::tabulate(name, {{"x", X}}, {}, {}, chain3, [&](std::span<const std::size_t> i) {
        return chain3.from_real(i[0] ? b : a);
    });
}

std::vector<double> values(const MultiMorphism& m) {
    std::vector<double> out;
    for (const auto& v : m.values()) out.push_back(m.algebra().to_real(v));
    return out;
}

Pool random_pool(std::mt19937_64& rng, std::size_t n_concepts, std::size_t n_diagrams) {
    const double levels[] = {0.0, 0.5, 1.0};
    Pool p;
    for (std::size_t i = 0; i < n_concepts; ++i)
        p.concepts.push_back(concept_of("c" + std::to_string(i), levels[rng() % 3], levels[rng() % 3]));
    for (std::size_t i = 0; i < n_diagrams; ++i)
        p.diagrams.push_back({"D" + std::to_string(i), concept_of("D" + std::to_string(i), levels[rng() % 3], levels[rng() % 3])});
    return p;
}

// Plain double reading of the pool, used as the reference.
struct Ref {
    std::vector<std::vector<double>> concepts, diagrams;
    double lambda;

    Ref(const Pool& p, double l) : lambda(l) {
        for (const auto& c : p.concepts) concepts.push_back(values(c));
        for (const auto& d : p.diagrams) diagrams.push_back(values(d.map));
    }
    static bool leq(const std::vector<double>& f, const std::vector<double>& g) {
        for (std::size_t i = 0; i < f.size(); ++i)
            if (f[i] > g[i] + 1e-9) return false;
        return true;
    }
    std::vector<std::size_t> answers(std::size_t d) const {
        std::vector<std::size_t> out;
        for (std::size_t c = 0; c < concepts.size(); ++c) {
            bool ok = true;
            for (std::size_t i = 0; i < 2; ++i) ok = ok && 1 - std::abs(concepts[c][i] - diagrams[d][i]) >= lambda - 1e-9;
            if (ok) out.push_back(c);
        }
        return out;
    }
    std::vector<double> ans(const std::vector<std::size_t>& U) const {
        std::vector<double> out(2, 0.0);
        for (auto d : U)
            for (auto c : answers(d))
                for (std::size_t i = 0; i < 2; ++i) out[i] = std::max(out[i], concepts[c][i]);
        return out;
    }
    std::vector<double> interior(const std::vector<double>& g) const {
        std::vector<double> out(2, 0.0);
        for (std::size_t d = 0; d < diagrams.size(); ++d)
            for (auto c : answers(d))
                if (leq(concepts[c], g))
                    for (std::size_t i = 0; i < 2; ++i) out[i] = std::max(out[i], concepts[c][i]);
        return out;
    }
    std::vector<double> closure(const std::vector<double>& g) const {
        std::vector<double> out(2, 1.0);
        for (std::size_t d = 0; d < diagrams.size(); ++d)
            for (auto c : answers(d))
                if (leq(g, concepts[c]))
                    for (std::size_t i = 0; i < 2; ++i) out[i] = std::min(out[i], concepts[c][i]);
        return out;
    }
    bool entails(const std::vector<std::size_t>& U, std::size_t d) const {
        auto a = ans(U);
        for (auto c : answers(d))
            if (!leq(concepts[c], a)) return false;
        return true;
    }
};

Indices subset(unsigned mask, std::size_t n) {
    Indices out;
    for (std::size_t i = 0; i < n; ++i)
        if (mask & (1u << i)) out.push_back(i);
    return out;
}

}  // namespace

TEST_CASE("gamma is reflexive and detects differences") {
    auto d = concept_of("d", 0.5, 1.0);
    CHECK(chain3.is_top(similarity_degree(d, d)));
    auto b = Algebra::boolean();
    auto B = OmegaSet::crisp({"0", "1"}, b, "B");
    auto f = MultiMorphism::tabulate("f", {{"x", B}}, {}, {}, b, [](std::span<const std::size_t> i) { return TruthValue(i[0] ? 1.0 : 0.0); });
    auto g = MultiMorphism::constant("g", {{"x", B}}, {}, {}, b.top(), b);
    CHECK(b.is_bottom(similarity_degree(f, g)));
}

TEST_CASE("gamma is transitive on random triples") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(0, 1);
    for (const auto& s : oracle::scalars()) {
        auto alg = oracle::algebra_of(s.name);
        auto A = OmegaSet::crisp(oracle::support(3), alg, "A");
        for (int trial = 0; trial < 100; ++trial) {
            auto mk = [&](const char* n) {
                return MultiMorphism::tabulate(n, {{"x", A}}, {}, {}, alg, [&](std::span<const std::size_t>) { return TruthValue(u(rng)); });
            };
            auto d0 = mk("d0"), d1 = mk("d1"), d2 = mk("d2");
            auto g01 = gamma(d0, d1), g12 = gamma(d1, d2), g02 = gamma(d0, d2);
            for (std::size_t i = 0; i < 3; ++i) {
                double a = d0.value(i).scalar(), b = d1.value(i).scalar(), c = d2.value(i).scalar();
                double e01 = s.tensor(s.implies(a, b), s.implies(b, a));
                CHECK(g01.value(i).scalar() == doctest::Approx(e01));
                CHECK(s.tensor(g01.value(i).scalar(), g12.value(i).scalar()) <= g02.value(i).scalar() + 1e-9);
            }
        }
    }
}

TEST_CASE("gamma projects a wider description") {
    auto alg = Algebra::goedel();
    auto A = OmegaSet::crisp({"0", "1"}, alg, "A");
    auto narrow = MultiMorphism::constant("n", {{"x", A}}, {}, {}, 0.6, alg);
    auto wide = MultiMorphism::tabulate("w", {{"x", A}, {"y", A}}, {}, {}, alg, [](std::span<const std::size_t> i) {
        return TruthValue(0.2 + 0.3 * double(i[0] + i[1]));
    });
    auto g = gamma(narrow, wide);
    REQUIRE(g.rank() == 1);
    // sup over y: x = 0 gives 0.5, x = 1 gives 0.8
    CHECK(g.at({0}).scalar() == doctest::Approx(0.5));
    CHECK(g.at({1}).scalar() == doctest::Approx(0.6));
    auto B = OmegaSet::crisp({"0"}, alg, "B");
    auto other = MultiMorphism::constant("o", {{"z", B}}, {}, {}, 0.6, alg);
    CHECK_THROWS_AS(gamma(narrow, other), ShapeError);
}

TEST_CASE("model modes") {
    auto d = concept_of("d", 0.5, 1.0);
    auto md = concept_of("md", 0.0, 1.0);
    CHECK(models(md, md, chain3.top(), ModelMode::forall).holds);
    CHECK_FALSE(models(d, md, chain3.top(), ModelMode::forall).holds);
    CHECK(models(d, md, chain3.top(), ModelMode::exists).holds);
    CHECK(models(d, md, chain3.from_real(0.5), ModelMode::forall).holds);
    CHECK(models(d, md, chain3.top(), ModelMode::on_domain, {1}).holds);
    CHECK_FALSE(models(d, md, chain3.top(), ModelMode::on_domain, {0, 1}).holds);
    CHECK_THROWS_AS(models(d, md, chain3.top(), ModelMode::on_domain, {7}), ShapeError);
}

TEST_CASE("crisp dataset answers its enumerated query") {
    auto b = Algebra::boolean();
    auto P = OmegaSet::crisp({"p0", "p1", "p2"}, b, "P");
    auto C = OmegaSet::crisp({"red", "blue"}, b, "C");
    // rows (p0, red), (p1, blue), (p2, red)
    auto data = MultiMorphism::tabulate("d", {{"p", P}, {"c", C}}, {}, {}, b, [](std::span<const std::size_t> i) {
        return TruthValue((i[0] == 1) == (i[1] == 1) ? 1.0 : 0.0);
    });
    auto query = data.renamed("q");
    CHECK(models(data, query, b.top(), ModelMode::forall).holds);
}

TEST_CASE("answers, interior and closure agree with the reference") {
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 40; ++trial) {
        auto pool = random_pool(rng, 1 + trial % 6, 1 + trial % 5);
        for (double l : {0.0, 0.5, 1.0}) {
            Reasoner r(pool, chain3.from_real(l));
            Ref ref(pool, l);
            for (std::size_t d = 0; d < pool.diagrams.size(); ++d) CHECK(r.answers(d) == ref.answers(d));
            for (const auto& g : pool.concepts) {
                CHECK(values(r.interior(g)) == ref.interior(values(g)));
                CHECK(values(r.closure(g)) == ref.closure(values(g)));
            }
            for (unsigned m = 0; m < (1u << pool.diagrams.size()); ++m) {
                auto U = subset(m, pool.diagrams.size());
                CHECK(values(r.ans(U)) == ref.ans(U));
                for (std::size_t d = 0; d < pool.diagrams.size(); ++d) CHECK(r.entails(U, d) == ref.entails(U, d));
            }
        }
    }
}

TEST_CASE("answers shrink as the threshold rises") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 30; ++trial) {
        auto pool = random_pool(rng, 8, 4);
        Reasoner lo(pool, chain3.from_real(0.5)), hi(pool, chain3.top());
        for (std::size_t d = 0; d < 4; ++d) {
            const auto& a = hi.answers(d);
            const auto& b = lo.answers(d);
            CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
        }
        // a diagram's own interpretation answers it
        Pool self = pool;
        self.concepts.push_back(pool.diagrams[0].map);
        for (double l : {0.0, 0.5, 1.0}) {
            Reasoner r(self, chain3.from_real(l));
            const auto& a = r.answers(0);
            CHECK(std::count(a.begin(), a.end(), self.concepts.size() - 1) == 1);
        }
    }
}

TEST_CASE("interior and closure bracket the concept") {
    std::mt19937_64 rng(54);
    for (int trial = 0; trial < 30; ++trial) {
        auto pool = random_pool(rng, 6, 6);
        Reasoner r(pool, chain3.from_real(0.5));
        for (const auto& g : pool.concepts) {
            auto i = r.interior(g), c = r.closure(g);
            CHECK(guarded_leq(i, g));
            CHECK(guarded_leq(g, c));
            CHECK(approx_equal(r.interior(i), i));
            CHECK(approx_equal(r.closure(c), c));
        }
    }
}

TEST_CASE("box collects diagrams whose answers sit below the concept") {
    Pool pool;
    pool.concepts = {concept_of("low", 0.0, 0.5), concept_of("high", 1.0, 1.0)};
    pool.diagrams = {{"L", concept_of("L", 0.0, 0.5)}, {"H", concept_of("H", 1.0, 1.0)}};
    Reasoner r(pool, chain3.top());
    CHECK(r.box(concept_of("g", 0.5, 0.5)) == Indices{0});
    CHECK(r.diamond(concept_of("g", 0.5, 0.5)) == Indices{1});
    CHECK(r.box(concept_of("g", 1.0, 1.0)) == Indices{0, 1});
}

TEST_CASE("consequence rules on a small pool") {
    std::mt19937_64 rng(55);
    auto pool = random_pool(rng, 6, 5);
    for (double l : {0.0, 0.5, 1.0}) {
        Reasoner r(pool, chain3.from_real(l));
        const std::size_t n = pool.diagrams.size();
        for (unsigned mu = 0; mu < (1u << n); ++mu) {
            auto U = subset(mu, n);
            for (auto d : U) CHECK(r.entails(U, d));
            for (unsigned mv = 0; mv < (1u << n); ++mv) {
                auto UV = subset(mu | mv, n);
                auto V = subset(mv, n);
                for (std::size_t d = 0; d < n; ++d) {
                    if (r.entails(U, d)) CHECK(r.entails(UV, d));
                    if (!r.entails(V, d)) continue;
                    auto Ud = subset(mu | (1u << d), n);
                    for (std::size_t d2 = 0; d2 < n; ++d2)
                        if (r.entails(Ud, d2)) CHECK(r.entails(UV, d2));
                }
            }
        }
    }
    CHECK_THROWS_AS(Reasoner(pool, chain3.top()).entails({}, 99), ReferenceError);
}

TEST_CASE("formula parsing") {
    auto f = parse_formula("a & b -> [I] c | (d * e)");
    CHECK(format_formula(f) == "((a & b) -> ([I]c | (d * e)))");
    CHECK(format_formula(parse_formula("a -> b -> c")) == "(a -> (b -> c))");
    CHECK_THROWS_WITH_AS(parse_formula("a & "), doctest::Contains("offset"), InputError);
    CHECK_THROWS_AS(parse_formula("(a"), InputError);
    CHECK_THROWS_AS(parse_formula("a b"), InputError);
}

TEST_CASE("formula evaluation") {
    std::mt19937_64 rng(56);
    for (int trial = 0; trial < 30; ++trial) {
        auto pool = random_pool(rng, 4, 3);
        const auto& D0 = pool.diagrams[0];
        CHECK(eval_rl(parse_formula(D0.name), D0.map, pool, chain3.top()));
        for (const auto& g : pool.concepts) {
            auto d0 = similarity_degree(g, pool.diagrams[0].map);
            auto d1 = similarity_degree(g, pool.diagrams[1].map);
            CHECK(eval_rl(parse_formula("D0 & D1"), g, pool, chain3.meet(d0, d1)));
            CHECK(eval_rl(parse_formula("D0"), g, pool, d0));
            CHECK(rl_degree(parse_formula("D0 | D1"), g, pool) == chain3.join(d0, d1));
            CHECK(rl_degree(parse_formula("D0 -> D1"), g, pool) == chain3.implies(d0, d1));
        }
    }
    auto pool = random_pool(rng, 2, 1);
    CHECK_THROWS_AS(eval_rl(parse_formula("nope"), pool.concepts[0], pool, chain3.top()), ReferenceError);
}

TEST_CASE("pools reject mixed signatures") {
    Pool p;
    p.concepts.push_back(concept_of("c", 0, 1));
    auto B = OmegaSet::crisp({"0"}, chain3, "B");
    p.concepts.push_back(MultiMorphism::constant("z", {{"z", B}}, {}, {}, chain3.top(), chain3));
    CHECK_THROWS_AS(p.validate(), ShapeError);
    Pool q;
    CHECK_THROWS_AS(Reasoner(q, chain3.top()).top(), PreconditionError);
}
