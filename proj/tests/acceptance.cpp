// Acceptance run: one PASS/FAIL line per criterion, exit code = number of failures.
#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "omegasketch/bayes.hpp"
#include "omegasketch/consistency.hpp"
#include "omegasketch/diagram.hpp"
#include "omegasketch/errors.hpp"
#include "omegasketch/grammar.hpp"
#include "omegasketch/io.hpp"
#include "omegasketch/semiotic.hpp"
#include "support.hpp"

using namespace osk;
namespace fs = std::filesystem;

namespace {

const fs::path data = DATA_DIR;

struct Outcome {
    bool pass = true;
    std::ostringstream note;
    void fail(const std::string& why) {
        pass = false;
        note << "[" << why << "] ";
    }
};

Semiotic load_pair(const std::string& dir, const std::string& sys, const std::string& model) {
    return io::load_semiotic(io::load(data / dir / sys), io::load(data / dir / model));
}

Configuration config(const std::string& path) { return io::parse_configuration(io::load(data / path)); }

std::string fmt(double v) {
    std::ostringstream o;
    o << v;
    return o.str();
}

// ---------------------------------------------------------------- 1

void additive_identity(Outcome& out) {
    auto t0 = std::chrono::steady_clock::now();
    auto s = load_pair("additive", "signsystem.json", "model.json");
    auto m = relation_map(s, config("additive/identity.json"));
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (m.rank() != 1) return out.fail("limit has rank " + std::to_string(m.rank()));
    const auto& set = m.attributes()[0].set;
    for (const std::string x : {"0", "1", "2"}) {
        double v = m.at({set.index_of(x)}).scalar();
        out.note << v << "=[" << x << "] ";
        if (std::abs(v - 1.0) > 1e-9) out.fail("value at " + x + " is " + fmt(v));
    }
    out.note << "in " << secs << " s";
    if (secs >= 1.0) out.fail("took " + fmt(secs) + " s");
}

// ---------------------------------------------------------------- 2

void linear_axioms(Outcome& out) {
    auto s = load_pair("linear", "signsystem.json", "model.json");
    for (const std::string name : {"reflexivity", "antisymmetry", "transitivity"}) {
        auto m = relation_map(s, config("linear/" + name + ".json"));
        double lo = 1.0;
        std::size_t below = 0, first = 0;
        for (std::size_t i = 0; i < m.cell_count(); ++i) {
            double v = m.value(i).scalar();
            if (v < 1.0 - 1e-9 && below++ == 0) first = i;
            lo = std::min(lo, v);
        }
        out.note << name << " min " << lo << " over " << m.cell_count() << " tuples; ";
        if (below)
            out.fail(name + ": " + std::to_string(below) + " tuples below 1, first " + m.tuple_label(first) + " = " +
                     fmt(m.value(first).scalar()));
    }
}

// ---------------------------------------------------------------- 3

// Direct residuation and divisibility check over the given triples.
std::size_t law_violations(const Algebra& alg, const std::vector<TruthValue>& xs, bool divisible) {
    std::size_t bad = 0;
    for (const auto& x : xs)
        for (const auto& y : xs) {
            if (divisible && !alg.approx_equal(alg.tensor(x, alg.implies(x, y)), alg.meet(x, y))) ++bad;
            for (const auto& z : xs)
                if (alg.leq(alg.tensor(x, y), z) != alg.leq(x, alg.implies(y, z))) ++bad;
        }
    return bad;
}

void algebra_laws(Outcome& out) {
    std::size_t chains = 0, divisible = 0;
    for (int n = 2; n <= 5; ++n)
        for (const auto& t : oracle::chain_tnorms(n)) {
            auto alg = Algebra::finite_chain(oracle::labels(n), t, oracle::residuum(t));
            const bool div = oracle::divisible(t);
            ++chains;
            divisible += div;
            auto report = check_laws(alg, 0);
            if (!report.exhaustive) out.fail("chain check not exhaustive");
            if (!report.find("residuation")->passed) out.fail("residuation on " + alg.name());
            if (alg.divisible() != div) out.fail("divisibility flag wrong on a " + std::to_string(n) + "-chain");
            if (div && (!report.find("divisibility") || !report.find("divisibility")->passed))
                out.fail("divisibility on a " + std::to_string(n) + "-chain");
            if (auto v = law_violations(alg, *alg.carrier(), div))
                out.fail(std::to_string(v) + " direct violations on a " + std::to_string(n) + "-chain");
        }
    out.note << chains << " chain t-norms (" << divisible << " divisible); ";

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (auto alg : {Algebra::lukasiewicz(), Algebra::goedel(), Algebra::product_tnorm()}) {
        auto report = check_laws(alg, 10000, 11);
        std::size_t checked = report.find("residuation")->checked;
        if (checked < 10000) out.fail(alg.name() + " sampled only " + std::to_string(checked));
        if (!report.all_passed()) out.fail(alg.name() + " law report failed");
        std::size_t bad = 0;
        for (int i = 0; i < 10000; ++i) {
            TruthValue x(u(rng)), y(u(rng)), z(u(rng));
            if (!alg.approx_equal(alg.tensor(x, alg.implies(x, y)), alg.meet(x, y))) ++bad;
            // residuation with a tolerance on both sides of the boundary
            double xy = alg.tensor(x, y).scalar(), r = alg.implies(y, z).scalar();
            if (xy <= z.scalar() - 1e-9 && x.scalar() > r + 1e-9) ++bad;
            if (x.scalar() <= r - 1e-9 && xy > z.scalar() + 1e-9) ++bad;
        }
        if (bad) out.fail(std::to_string(bad) + " sampled violations for " + alg.name());
    }
    out.note << "3 x 10^4 sampled triples; ";

    auto t = oracle::chain_tnorms(4).front();
    auto r = oracle::residuum(t);
    r[2][1] = 3;
    auto corrupt = check_laws(Algebra::finite_chain(oracle::labels(4), t, r, false), 0);
    const auto* res = corrupt.find("residuation");
    if (res->passed || res->witness.empty()) out.fail("corrupted implication table accepted");
    else out.note << "corrupted table witness " << res->witness;
}

// ---------------------------------------------------------------- 4

// Random relation whose row suprema equal the given extents.
oracle::Matrix rows_with_sup(const std::vector<double>& sup, std::size_t cols, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0, 1);
    oracle::Matrix m(sup.size(), std::vector<double>(cols));
    for (std::size_t i = 0; i < sup.size(); ++i) {
        for (auto& v : m[i]) v = sup[i] * u(rng);
        m[i][rng() % cols] = sup[i];
    }
    return m;
}

std::vector<double> column_sup(const oracle::Matrix& m) {
    std::vector<double> out(m.empty() ? 0 : m[0].size(), 0.0);
    for (const auto& row : m)
        for (std::size_t j = 0; j < row.size(); ++j) out[j] = std::max(out[j], row[j]);
    return out;
}

void bayes_equation(Outcome& out) {
    std::mt19937_64 rng(4);
    for (const auto& s : oracle::scalars()) {
        auto alg = oracle::algebra_of(s.name);
        std::size_t relations = 0, cells = 0, eq_bad = 0, chained = 0, chain_bad = 0;
        double worst = 0;
        for (int trial = 0; trial < 120; ++trial) {
            std::size_t na = 1 + rng() % 6, nb = 1 + rng() % 6, nc = 1 + rng() % 6;
            auto tf = oracle::random_total_faithful(na, nb, rng);
            auto A = oracle::diagonal_set("A", tf.row_extent, alg);
            auto B = oracle::diagonal_set("B", tf.col_extent, alg);
            auto f = oracle::morphism(tf.m, A, B, "a", "b", alg, "f");
            auto mg = rows_with_sup(tf.col_extent, nc, rng);
            auto C = oracle::diagonal_set("C", column_sup(mg), alg);
            auto g = oracle::morphism(mg, B, C, "b", "c", alg, "g");
            auto fg = compose(f, g);
            ++relations;
            for (std::size_t a = 0; a < na; ++a) {
                Description given{{"a", A.label(a)}};
                auto c = condition(f, given);
                for (std::size_t b = 0; b < nb; ++b, ++cells)
                    if (std::abs(s.tensor(tf.row_extent[a], c.map.at({b}).scalar()) - tf.m[a][b]) > 1e-9) ++eq_bad;
                auto lhs = chain(c, g);
                auto rhs = condition(fg, given, A);
                ++chained;
                for (std::size_t k = 0; k < nc; ++k) {
                    double d = std::abs(lhs.map.at({k}).scalar() - rhs.map.at({k}).scalar());
                    worst = std::max(worst, d);
                    if (d > 1e-9) {
                        ++chain_bad;
                        break;
                    }
                }
            }
        }
        out.note << s.name << ": " << relations << " relations, " << cells << " cells, chain mismatch " << chain_bad
                 << "/" << chained << " (max " << worst << "); ";
        if (eq_bad) out.fail(s.name + ": " + std::to_string(eq_bad) + " cells break the equation");
        if (chain_bad) out.fail(s.name + ": chaining differs from conditioning the composite");
    }
}

// ---------------------------------------------------------------- 5

struct Shape {
    std::vector<std::size_t> sizes;
    // (source vertex, target vertex, image table)
    std::vector<std::tuple<std::size_t, std::size_t, std::vector<std::size_t>>> arrows;
};

MultiDiagram build(const Shape& sh, const Algebra& alg) {
    MultiDiagram d;
    for (std::size_t v = 0; v < sh.sizes.size(); ++v) {
        std::string id = "v" + std::to_string(v);
        d.graph.vertices.push_back({id, id});
        d.vertex_sets.emplace(id, OmegaSet::crisp(oracle::support(sh.sizes[v]), alg, id));
    }
    for (std::size_t k = 0; k < sh.arrows.size(); ++k) {
        const auto& [s, t, img] = sh.arrows[k];
        std::string id = "e" + std::to_string(k);
        std::string sv = "v" + std::to_string(s), tv = "v" + std::to_string(t);
        d.graph.arrows.push_back({id, id, {sv}, {tv}});
        d.arrow_maps.emplace(id, SetMap{img}.chi(d.set_of(sv), d.set_of(tv)));
    }
    return d;
}

// Classical limit: tuples respecting every arrow, as flat indices in vertex order.
std::vector<bool> classical_limit(const Shape& sh) {
    std::size_t total = 1;
    for (auto n : sh.sizes) total *= n;
    std::vector<bool> out(total);
    std::vector<std::size_t> x(sh.sizes.size());
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        for (std::size_t v = sh.sizes.size(); v-- > 0;) {
            x[v] = rest % sh.sizes[v];
            rest /= sh.sizes[v];
        }
        bool ok = true;
        for (const auto& [s, t, img] : sh.arrows) ok = ok && img[x[s]] == x[t];
        out[flat] = ok;
    }
    return out;
}

struct Tally {
    std::size_t diagrams = 0, discrepancies = 0;
    std::string first;
};

void compare(const Shape& sh, const Algebra& alg, Tally& tally) {
    auto lim = limit(build(sh, alg));
    auto expect = classical_limit(sh);
    ++tally.diagrams;
    for (std::size_t i = 0; i < expect.size(); ++i)
        if (alg.is_top(lim.value(i)) != expect[i] || !(alg.is_top(lim.value(i)) || alg.is_bottom(lim.value(i)))) {
            if (tally.discrepancies++ == 0) tally.first = lim.tuple_label(i);
            break;
        }
}

// Every arrow (s, t, map) between vertices of the given sizes.
std::vector<std::tuple<std::size_t, std::size_t, std::vector<std::size_t>>> arrow_choices(
    const std::vector<std::size_t>& sizes) {
    std::vector<std::tuple<std::size_t, std::size_t, std::vector<std::size_t>>> out;
    for (std::size_t s = 0; s < sizes.size(); ++s)
        for (std::size_t t = 0; t < sizes.size(); ++t) {
            std::size_t count = 1;
            for (std::size_t i = 0; i < sizes[s]; ++i) count *= sizes[t];
            for (std::size_t code = 0; code < count; ++code) {
                std::vector<std::size_t> img(sizes[s]);
                std::size_t rest = code;
                for (auto& v : img) {
                    v = rest % sizes[t];
                    rest /= sizes[t];
                }
                out.emplace_back(s, t, img);
            }
        }
    return out;
}

// Vertex sizes in non-decreasing order: other orders are relabellings.
void size_vectors(std::size_t n, std::size_t max_size, std::vector<std::size_t>& cur,
                  const std::function<void(const std::vector<std::size_t>&)>& fn) {
    if (cur.size() == n) return fn(cur);
    for (std::size_t k = cur.empty() ? 1 : cur.back(); k <= max_size; ++k) {
        cur.push_back(k);
        size_vectors(n, max_size, cur, fn);
        cur.pop_back();
    }
}

void sweep(std::size_t max_vertices, std::size_t max_size, std::size_t max_arrows, const Algebra& alg, Tally& tally) {
    for (std::size_t n = 1; n <= max_vertices; ++n) {
        std::vector<std::size_t> cur;
        size_vectors(n, max_size, cur, [&](const std::vector<std::size_t>& sizes) {
            auto choices = arrow_choices(sizes);
            Shape sh{sizes, {}};
            // arrow multisets as non-decreasing index sequences
            std::function<void(std::size_t)> rec = [&](std::size_t from) {
                compare(sh, alg, tally);
                if (sh.arrows.size() == max_arrows) return;
                for (std::size_t i = from; i < choices.size(); ++i) {
                    sh.arrows.push_back(choices[i]);
                    rec(i);
                    sh.arrows.pop_back();
                }
            };
            rec(0);
        });
    }
}

void boolean_degeneracy(Outcome& out) {
    auto alg = Algebra::boolean();
    Tally tally;
    sweep(4, 2, 3, alg, tally);
    out.note << "sizes<=2 arrows<=3: " << tally.diagrams << "; ";
    std::size_t before = tally.diagrams;
    sweep(3, 3, 2, alg, tally);
    sweep(4, 3, 1, alg, tally);
    out.note << "sizes<=3 arrows<=2 (4 vertices: <=1): " << tally.diagrams - before << "; ";
    before = tally.diagrams;
    sweep(3, 4, 1, alg, tally);
    out.note << "sizes<=4 arrows<=1: " << tally.diagrams - before << "; ";
    before = tally.diagrams;
    std::mt19937_64 rng(5);
    for (int i = 0; i < 5000; ++i) {
        Shape sh;
        sh.sizes.resize(1 + rng() % 4);
        for (auto& n : sh.sizes) n = 1 + rng() % 4;
        std::size_t arrows = 1 + rng() % 3;
        for (std::size_t k = 0; k < arrows; ++k) {
            std::size_t s = rng() % sh.sizes.size(), t = rng() % sh.sizes.size();
            std::vector<std::size_t> img(sh.sizes[s]);
            for (auto& v : img) v = rng() % sh.sizes[t];
            sh.arrows.emplace_back(s, t, img);
        }
        compare(sh, alg, tally);
    }
    out.note << "random up to 4 vertices, sizes 4, 3 arrows: " << tally.diagrams - before << "; discrepancies "
             << tally.discrepancies;
    if (tally.discrepancies) out.fail("first discrepancy at " + tally.first);
}

// ---------------------------------------------------------------- 6

void gaussian(Outcome& out) {
    auto d = io::parse_diagram(io::load(data / "gauss/D.json"));
    auto r = commutativity(d);
    out.note << "D degree " << r.degree.scalar() << "; ";
    if (std::abs(r.degree.scalar() - 1.0) > 1e-6) out.fail("D is not commutative at " + r.witness);
    auto dp = io::parse_diagram(io::load(data / "gauss/Dprime.json"));
    auto rp = commutativity(dp, TruthValue(0.8));
    out.note << "D' degree " << rp.degree.scalar();
    if (!rp.meets_lambda.value_or(false) && rp.degree.scalar() < 0.8 - 1e-9)
        out.fail("D' degree below 0.8 at " + rp.witness);
}

// ---------------------------------------------------------------- 7

// Six signs: three general ones, each specialised by one more.
Ontology random_ontology(std::mt19937_64& rng, std::vector<std::string>& signs) {
    const std::size_t n = 2 + rng() % 5;
    signs.clear();
    for (std::size_t i = 0; i < n; ++i) signs.push_back(std::string(1, char('a' + i)));
    std::vector<std::pair<std::string, std::string>> order;
    const std::size_t top = (n + 1) / 2;
    for (std::size_t i = top; i < n; ++i) order.emplace_back(signs[i], signs[rng() % top]);
    return Ontology(signs, order);
}

Word random_word(std::mt19937_64& rng, const std::vector<std::string>& signs) {
    Word w(rng() % 9);
    for (auto& s : w) {
        s = signs[rng() % signs.size()];
        if (rng() % 2) s = Ontology::dual(s);
    }
    return w;
}

void string_gluing(Outcome& out) {
    std::mt19937_64 rng(7);
    std::size_t identity_bad = 0, oracle_bad = 0, assoc_bad = 0;
    std::string example;
    for (int i = 0; i < 500; ++i) {
        std::vector<std::string> signs;
        auto ont = random_ontology(rng, signs);
        auto w = random_word(rng, signs), w2 = random_word(rng, signs), w3 = random_word(rng, signs);
        if (glue_words(w, {}, ont) != w || glue_words({}, w, ont) != w) ++identity_bad;
        auto left = glue_words(glue_words(w, w2, ont), w3, ont);
        auto right = glue_words(w, glue_words(w2, w3, ont), ont);
        auto ref_left = oracle::glue(oracle::glue(w, w2, ont), w3, ont);
        auto ref_right = oracle::glue(w, oracle::glue(w2, w3, ont), ont);
        if (left != ref_left || right != ref_right) ++oracle_bad;
        if (left != right && assoc_bad++ == 0)
            example = "(" + format_word(w) + " | " + format_word(w2) + " | " + format_word(w3) + ") gives '" +
                      format_word(left) + "' vs '" + format_word(right) + "'";
    }
    out.note << "500 triples: identity failures " << identity_bad << ", reference mismatches " << oracle_bad
             << ", non-associative " << assoc_bad << "; ";
    if (identity_bad) out.fail("identity law broken");
    if (oracle_bad) out.fail("gluing disagrees with the reference");
    if (assoc_bad) out.fail("associativity fails, e.g. " + example);
}

// ---------------------------------------------------------------- 8

struct RelationTally {
    std::size_t converse = 0, assoc = 0, identity = 0, preserve = 0, checked = 0, pairs = 0, triples = 0;
    std::string preserve_example;
};

std::vector<oracle::Matrix> all_matrices(std::size_t r, std::size_t c) {
    const double levels[] = {0.0, 0.5, 1.0};
    std::size_t count = 1;
    for (std::size_t i = 0; i < r * c; ++i) count *= 3;
    std::vector<oracle::Matrix> out;
    for (std::size_t code = 0; code < count; ++code) {
        oracle::Matrix m(r, std::vector<double>(c));
        std::size_t rest = code;
        for (auto& row : m)
            for (auto& v : row) {
                v = levels[rest % 3];
                rest /= 3;
            }
        out.push_back(m);
    }
    return out;
}

std::vector<double> row_sup(const oracle::Matrix& m) {
    std::vector<double> out;
    for (const auto& row : m) out.push_back(*std::max_element(row.begin(), row.end()));
    return out;
}

// Pair laws plus preservation, with extents read off the relations.
void check_pair(const oracle::Scalar& s, const Algebra& alg, const oracle::Matrix& mf, const oracle::Matrix& mg,
                RelationTally& t) {
    ++t.pairs;
    auto A = oracle::diagonal_set("A", row_sup(mf), alg);
    auto B = oracle::diagonal_set("B", column_sup(mf), alg);
    auto C = oracle::diagonal_set("C", column_sup(mg), alg);
    auto f = oracle::morphism(mf, A, B, "a", "b", alg, "f");
    auto g = oracle::morphism(mg, B, C, "b", "c", alg, "g");
    auto fg = compose(f, g);
    auto expect = oracle::compose(mf, mg, s.tensor);
    if (oracle::max_diff(oracle::matrix(fg, "a", "c"), expect) > 1e-9) ++t.assoc;
    if (oracle::max_diff(oracle::matrix(compose(transpose(g), transpose(f)), "c", "a"), oracle::transpose(expect)) >
            1e-9 ||
        !approx_equal(transpose(fg), compose(transpose(g), transpose(f))))
        ++t.converse;
    auto id = identity(A, "x", "a");
    if (oracle::max_diff(oracle::matrix(compose(id, f), "x", "b"), mf) > 1e-9) ++t.identity;
    // g is total in B only when its row suprema are B's extents
    if (row_sup(mg) == column_sup(mf)) {
        ++t.checked;
        if (!is_total(fg) || !is_faithful(fg)) {
            if (t.preserve++ == 0) {
                std::ostringstream o;
                o << s.name << " f=";
                for (const auto& row : mf)
                    for (double v : row) o << v << ' ';
                o << "g=";
                for (const auto& row : mg)
                    for (double v : row) o << v << ' ';
                t.preserve_example = o.str();
            }
        }
    }
}

void check_triple(const Algebra& alg, const oracle::Matrix& mf, const oracle::Matrix& mg, const oracle::Matrix& mh,
                  RelationTally& t) {
    ++t.triples;
    auto A = OmegaSet::crisp(oracle::support(mf.size()), alg, "A");
    auto B = OmegaSet::crisp(oracle::support(mg.size()), alg, "B");
    auto C = OmegaSet::crisp(oracle::support(mh.size()), alg, "C");
    auto D = OmegaSet::crisp(oracle::support(mh[0].size()), alg, "D");
    auto f = oracle::morphism(mf, A, B, "a", "b", alg);
    auto g = oracle::morphism(mg, B, C, "b", "c", alg);
    auto h = oracle::morphism(mh, C, D, "c", "d", alg);
    if (!approx_equal(compose(compose(f, g), h), compose(f, compose(g, h)))) ++t.assoc;
}

void relation_laws(Outcome& out) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0, 1);
    for (const auto& s : oracle::scalars()) {
        auto alg = oracle::algebra_of(s.name);
        RelationTally t;
        // exhaustive: three-valued pairs on supports up to 2, triples on 1 x 2 x 2 x 1 chains
        for (std::size_t na = 1; na <= 2; ++na)
            for (std::size_t nb = 1; nb <= 2; ++nb)
                for (std::size_t nc = 1; nc <= 2; ++nc)
                    for (const auto& mf : all_matrices(na, nb))
                        for (const auto& mg : all_matrices(nb, nc)) check_pair(s, alg, mf, mg, t);
        // pairs with one support of 3
        for (const auto& [na, nb, nc] : std::vector<std::array<std::size_t, 3>>{{3, 1, 3}, {1, 3, 1}, {3, 1, 1}, {1, 1, 3}})
            for (const auto& mf : all_matrices(na, nb))
                for (const auto& mg : all_matrices(nb, nc)) check_pair(s, alg, mf, mg, t);
        for (const auto& mf : all_matrices(1, 2))
            for (const auto& mg : all_matrices(2, 2))
                for (const auto& mh : all_matrices(2, 1)) check_triple(alg, mf, mg, mh, t);
        for (const auto& mf : all_matrices(2, 2))
            for (const auto& mg : all_matrices(2, 1))
                for (const auto& mh : all_matrices(1, 2)) check_triple(alg, mf, mg, mh, t);
        // random [0, 1] instances on supports up to 3
        for (int i = 0; i < 1000; ++i) {
            std::size_t na = 1 + rng() % 3, nb = 1 + rng() % 3, nc = 1 + rng() % 3, nd = 1 + rng() % 3;
            auto rnd = [&](std::size_t r, std::size_t c) {
                oracle::Matrix m(r, std::vector<double>(c));
                for (auto& row : m)
                    for (auto& v : row) v = u(rng);
                return m;
            };
            auto mf = rnd(na, nb);
            // g built total in B so preservation applies
            auto mg = rows_with_sup(column_sup(mf), nc, rng);
            check_pair(s, alg, mf, mg, t);
            check_triple(alg, rnd(na, nb), rnd(nb, nc), rnd(nc, nd), t);
        }
        out.note << s.name << ": " << t.pairs << " pairs, " << t.triples << " triples, violations converse "
                 << t.converse << " assoc " << t.assoc << " identity " << t.identity << ", total+faithful lost "
                 << t.preserve << "/" << t.checked << "; ";
        if (t.converse || t.assoc || t.identity) out.fail(s.name + ": algebraic law broken");
        if (t.preserve) out.fail(s.name + ": composite not total+faithful, e.g. " + t.preserve_example);
    }
}

// ---------------------------------------------------------------- 9 and 10

const Algebra chain3 = Algebra::lukasiewicz_chain(3);
const OmegaSet X = OmegaSet::crisp({"a", "b"}, chain3, "X");
const double levels[] = {0.0, 0.5, 1.0};

MultiMorphism concept_of(const std::string& name, double a, double b) {
    return MultiMorphism::tabulate(name, {{"x", X}}, {}, {}, chain3,
                                   [&](std::span<const std::size_t> i) { return chain3.from_real(i[0] ? b : a); });
}

// All nine concepts over X.
std::vector<MultiMorphism> concept_space() {
    std::vector<MultiMorphism> out;
    for (double a : levels)
        for (double b : levels) out.push_back(concept_of("g" + std::to_string(out.size()), a, b));
    return out;
}

std::vector<double> reals(const MultiMorphism& m) {
    std::vector<double> out;
    for (const auto& v : m.values()) out.push_back(chain3.to_real(v));
    return out;
}

bool below(const std::vector<double>& f, const std::vector<double>& g) {
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] > g[i] + 1e-9) return false;
    return true;
}

// Independent reading of the consequence relation on plain doubles.
std::vector<unsigned> reference_consequences(const Pool& pool, double lambda) {
    const std::size_t n = pool.diagrams.size();
    std::vector<std::vector<std::size_t>> answers(n);
    for (std::size_t d = 0; d < n; ++d) {
        auto dv = reals(pool.diagrams[d].map);
        for (std::size_t c = 0; c < pool.concepts.size(); ++c) {
            auto cv = reals(pool.concepts[c]);
            bool ok = true;
            for (std::size_t i = 0; i < cv.size(); ++i) ok = ok && 1 - std::abs(cv[i] - dv[i]) >= lambda - 1e-9;
            if (ok) answers[d].push_back(c);
        }
    }
    std::vector<unsigned> out(1u << n);
    for (unsigned mu = 0; mu < (1u << n); ++mu) {
        std::vector<double> join(2, 0.0);
        for (std::size_t d = 0; d < n; ++d)
            if (mu & (1u << d))
                for (auto c : answers[d]) {
                    auto cv = reals(pool.concepts[c]);
                    for (std::size_t i = 0; i < 2; ++i) join[i] = std::max(join[i], cv[i]);
                }
        for (std::size_t d = 0; d < n; ++d) {
            bool ok = true;
            for (auto c : answers[d]) ok = ok && below(reals(pool.concepts[c]), join);
            if (ok) out[mu] |= 1u << d;
        }
    }
    return out;
}

Indices subset(unsigned mask, std::size_t n) {
    Indices out;
    for (std::size_t i = 0; i < n; ++i)
        if (mask & (1u << i)) out.push_back(i);
    return out;
}

void consequence_relation(Outcome& out) {
    std::mt19937_64 rng(9);
    const std::size_t n = 8;
    std::size_t inclusion = 0, monotony = 0, cut = 0, reference = 0, antitone = 0, checks = 0;
    std::string antitone_example;
    const int pools = 10;
    for (int p = 0; p < pools; ++p) {
        Pool pool;
        for (std::size_t i = 0; i < 8; ++i)
            pool.concepts.push_back(concept_of("c" + std::to_string(i), levels[rng() % 3], levels[rng() % 3]));
        for (std::size_t i = 0; i < n; ++i)
            pool.diagrams.push_back(
                {"D" + std::to_string(i), concept_of("D" + std::to_string(i), levels[rng() % 3], levels[rng() % 3])});
        std::vector<std::vector<unsigned>> cons;
        for (double l : levels) {
            Reasoner r(pool, chain3.from_real(l));
            std::vector<unsigned> a(1u << n);
            for (unsigned mu = 0; mu < (1u << n); ++mu)
                for (auto d : r.consequences(subset(mu, n))) a[mu] |= 1u << d;
            if (a != reference_consequences(pool, l)) ++reference;
            for (unsigned mu = 0; mu < (1u << n); ++mu) {
                if ((a[mu] & mu) != mu) ++inclusion;
                for (unsigned mv = 0; mv < (1u << n); ++mv) {
                    ++checks;
                    if ((a[mu] & a[mu | mv]) != a[mu]) ++monotony;
                    // V ⊢ D for every D in V's consequences; U ∪ {D} ⊢ D' ⇒ U ∪ V ⊢ D'
                    for (std::size_t d = 0; d < n; ++d)
                        if ((a[mv] >> d) & 1u)
                            if ((a[mu | (1u << d)] & a[mu | mv]) != a[mu | (1u << d)]) {
                                ++cut;
                                break;
                            }
                }
            }
            cons.push_back(std::move(a));
        }
        for (std::size_t lo = 0; lo < 3; ++lo)
            for (std::size_t hi = lo + 1; hi < 3; ++hi)
                for (unsigned mu = 0; mu < (1u << n); ++mu)
                    if ((cons[hi][mu] & cons[lo][mu]) != cons[hi][mu] && antitone++ == 0)
                        antitone_example = "pool " + std::to_string(p) + " U=" + std::to_string(mu) + " lambda " +
                                           fmt(levels[lo]) + " vs " + fmt(levels[hi]);
    }
    out.note << pools << " pools of 8 diagrams, " << checks << " (U,V) pairs; violations inclusion " << inclusion
             << " monotony " << monotony << " cut " << cut << " reference " << reference << " antitonicity "
             << antitone << "; ";
    if (inclusion || monotony || cut) out.fail("structural rule broken");
    if (reference) out.fail("consequences disagree with the reference");
    if (antitone) out.fail("consequences not antitone in lambda, e.g. " + antitone_example);
}

void interior_closure(Outcome& out) {
    auto space = concept_space();
    std::vector<std::vector<double>> vals;
    for (const auto& g : space) vals.push_back(reals(g));
    std::size_t pools = 0, bracket = 0, idem = 0, antitone = 0, cl_monotone = 0, open_closed = 0, artifacts = 0;
    // six-concept pools with up to six diagrams, smaller pools with up to two
    std::vector<std::pair<unsigned, unsigned>> masks;
    for (unsigned cm = 1; cm < 512; ++cm)
        for (unsigned dm = 0; dm < 512; ++dm) {
            int c = std::popcount(cm), d = std::popcount(dm);
            if ((c == 6 && d <= 6) || (c < 6 && d <= 2)) masks.emplace_back(cm, dm);
        }
    for (auto [cm, dm] : masks) {
            Pool pool;
            for (std::size_t i = 0; i < 9; ++i) {
                if (cm & (1u << i)) pool.concepts.push_back(space[i]);
                if (dm & (1u << i)) pool.diagrams.push_back({"D" + std::to_string(i), space[i]});
            }
            ++pools;
            std::vector<std::vector<std::vector<double>>> ints;
            for (double l : levels) {
                Reasoner r(pool, chain3.from_real(l));
                std::vector<bool> answer(pool.concepts.size());
                for (std::size_t d = 0; d < pool.diagrams.size(); ++d)
                    for (auto c : r.answers(d)) answer[c] = true;
                std::vector<std::vector<double>> row;
                for (std::size_t k = 0; k < space.size(); ++k) {
                    auto i = r.interior(space[k]), c = r.closure(space[k]);
                    auto iv = reals(i), cv = reals(c);
                    if (!below(iv, vals[k]) || !below(vals[k], cv)) ++bracket;
                    if (!approx_equal(r.interior(i), i) || !approx_equal(r.closure(c), c)) ++idem;
                    const bool open = approx_equal(i, space[k]), closed = approx_equal(c, space[k]);
                    bool expressible = false;
                    for (std::size_t j = 0; j < pool.concepts.size(); ++j)
                        expressible = expressible || (answer[j] && approx_equal(pool.concepts[j], space[k]));
                    if (open != closed) ++(expressible ? open_closed : artifacts);
                    row.push_back(iv);
                    row.push_back(cv);
                }
                ints.push_back(std::move(row));
            }
            for (std::size_t lo = 0; lo < 3; ++lo)
                for (std::size_t hi = lo + 1; hi < 3; ++hi)
                    for (std::size_t k = 0; k < space.size(); ++k) {
                        if (!below(ints[hi][2 * k], ints[lo][2 * k])) ++antitone;
                        if (!below(ints[lo][2 * k + 1], ints[hi][2 * k + 1])) ++cl_monotone;
                    }
        }
    out.note << pools << " pools x 9 concepts x 3 lambdas; violations bracket " << bracket << " idempotence " << idem
             << " int antitone " << antitone << " cl monotone " << cl_monotone << " open/closed " << open_closed
             << " (non-expressible open/closed splits " << artifacts << ")";
    if (bracket) out.fail("int <= id <= cl broken");
    if (idem) out.fail("idempotence broken");
    if (antitone) out.fail("interior not antitone in lambda");
    if (cl_monotone) out.fail("closure not monotone in lambda");
    if (open_closed) out.fail("open and closed differ on an answer concept");
}

// ---------------------------------------------------------------- 11

void integration(Outcome& out) {
    auto luk = load_pair("integration", "luk_signsystem.json", "luk_model.json");
    auto god = load_pair("integration", "goedel_signsystem.json", "goedel_model.json");
    auto both = integrate({luk, god});
    auto report = validate_model(both);
    if (!report.ok()) out.fail("integrated model invalid: " + report.failures().front()->detail);
    std::size_t cells = 0, bad = 0;
    for (std::size_t j = 0; j < 2; ++j) {
        const auto& part = j == 0 ? luk : god;
        for (const auto& [label, interp] : part.model.components) {
            const auto& lifted = both.model.components.at(label).map;
            for (std::size_t i = 0; i < interp.map.cell_count(); ++i, ++cells)
                if (!(both.model.algebra.project(j, lifted.value(i)) == interp.map.value(i))) ++bad;
        }
        for (const auto& [sign, set] : part.model.signs) {
            const auto& lifted = both.model.signs.at(sign);
            for (std::size_t a = 0; a < set.size(); ++a)
                for (std::size_t b = 0; b < set.size(); ++b, ++cells)
                    if (!(both.model.algebra.project(j, lifted.sim(a, b)) == set.sim(a, b))) ++bad;
        }
    }
    out.note << "algebra " << both.model.algebra.name() << ", " << cells << " projected values, " << bad
             << " not recovered; ";
    if (bad) out.fail("projection does not recover the original values");
    auto clash = load_pair("integration", "clash_signsystem.json", "clash_model.json");
    try {
        integrate({luk, clash});
        out.fail("clash accepted");
    } catch (const IntegrationError& e) {
        std::string msg = e.what();
        out.note << "clash: " << msg;
        if (msg.find("'p'") == std::string::npos) out.fail("clash message does not name the sign");
    }
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, void (*)(Outcome&)>> criteria{
        {"additive identity table", additive_identity},
        {"linear order axioms", linear_axioms},
        {"algebra law suite", algebra_laws},
        {"bayes equation and chaining", bayes_equation},
        {"boolean limits are classical limits", boolean_degeneracy},
        {"gaussian commutativity", gaussian},
        {"string gluing", string_gluing},
        {"relation algebra laws", relation_laws},
        {"consequence relation", consequence_relation},
        {"interior and closure", interior_closure},
        {"integration", integration},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(out);
        } catch (const std::exception& e) {
            out.fail(std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failures += !out.pass;
        std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " " << criteria[i].first << " ["
                  << std::fixed << std::setprecision(1) << secs << " s] " << std::defaultfloat << out.note.str()
                  << std::endl;
    }
    std::cout << failures << " of " << criteria.size() << " criteria failed\n";
    return failures;
}
