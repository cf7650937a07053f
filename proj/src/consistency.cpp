#include "omegasketch/consistency.hpp"

#include <algorithm>
#include <cctype>

#include "omegasketch/errors.hpp"

namespace osk {

namespace {

std::set<std::string> names_of(const MultiMorphism& m) {
    auto v = m.attribute_names();
    return {v.begin(), v.end()};
}

MultiMorphism undesignated(const MultiMorphism& m) { return m.with_designation({}, {}); }

bool all_top(const MultiMorphism& m) {
    const auto& alg = m.algebra();
    return std::all_of(m.values().begin(), m.values().end(), [&](const TruthValue& v) { return alg.is_top(v); });
}

MultiMorphism fill(const MultiMorphism& like, const TruthValue& v, std::string name) {
    return MultiMorphism::constant(std::move(name), like.attributes(), {}, {}, v, like.algebra());
}

}  // namespace

MultiMorphism gamma(const MultiMorphism& d0, const MultiMorphism& d1) {
    auto n0 = names_of(d0);
    auto n1 = names_of(d1);
    const bool sub = std::includes(n1.begin(), n1.end(), n0.begin(), n0.end());
    const bool sup = std::includes(n0.begin(), n0.end(), n1.begin(), n1.end());
    if (!sub && !sup)
        throw ShapeError("'" + d0.name() + "' and '" + d1.name() + "' have incomparable signatures");
    auto a = undesignated(d0);
    auto b = undesignated(d1);
    std::vector<std::string> order = d0.attribute_names();
    if (sub && !sup) {
        std::vector<std::string> hidden;
        for (const auto& n : n1)
            if (!n0.count(n)) hidden.push_back(n);
        b = marginalize(b, hidden);
    }
    auto g = pointwise(a, b, Connective::equiv).permuted(order);
    return g.renamed("Gamma(" + d0.name() + "," + d1.name() + ")");
}

TruthValue similarity_degree(const MultiMorphism& d0, const MultiMorphism& d1) {
    auto g = gamma(d0, d1);
    return meet_all(g.algebra(), g.values());
}

ModelResult models(const MultiMorphism& d, const MultiMorphism& md, const TruthValue& lambda, ModelMode mode,
                   const std::set<std::size_t>& domain) {
    const auto& alg = d.algebra();
    alg.require(lambda);
    ModelResult r{false, {}, gamma(d, md)};
    for (std::size_t i = 0; i < r.gamma.cell_count(); ++i)
        if (alg.approx_leq(lambda, r.gamma.value(i))) r.witnesses.push_back(i);
    auto reaches = [&](std::size_t i) { return std::binary_search(r.witnesses.begin(), r.witnesses.end(), i); };
    switch (mode) {
        case ModelMode::forall: r.holds = r.witnesses.size() == r.gamma.cell_count(); break;
        case ModelMode::exists: r.holds = !r.witnesses.empty(); break;
        case ModelMode::on_domain:
            for (auto i : domain)
                if (i >= r.gamma.cell_count()) throw ShapeError("domain index " + std::to_string(i) + " out of range");
            r.holds = std::all_of(domain.begin(), domain.end(), reaches);
            break;
    }
    return r;
}

bool guarded_leq(const MultiMorphism& f, const MultiMorphism& g, const MultiMorphism* guard) {
    auto imp = pointwise(undesignated(f), undesignated(g), Connective::implies);
    if (!guard) return all_top(imp);
    const auto& alg = f.algebra();
    // where the guard is not top the comparison is waived
    auto waived = pointwise(imp, undesignated(guard->mapped(alg, [&](const TruthValue& v) {
                                return alg.is_top(v) ? alg.bottom() : alg.top();
                            })),
                            Connective::join);
    return all_top(waived);
}

void Pool::validate() const {
    if (concepts.empty()) return;
    const auto& first = concepts.front();
    auto sig = names_of(first);
    for (const auto& c : concepts) {
        if (names_of(c) != sig) throw ShapeError("concept '" + c.name() + "' does not share the pool signature");
        if (!(c.algebra() == first.algebra())) throw ShapeError("concept '" + c.name() + "' uses a different algebra");
        for (const auto& a : c.attributes())
            if (a.set.support() != first.attribute(a.name).set.support())
                throw ShapeError("concept '" + c.name() + "': attribute '" + a.name + "' has a different support");
    }
    for (const auto& d : diagrams) {
        auto n = names_of(d.map);
        if (!std::includes(n.begin(), n.end(), sig.begin(), sig.end()) &&
            !std::includes(sig.begin(), sig.end(), n.begin(), n.end()))
            throw ShapeError("diagram '" + d.name + "' is not comparable with the pool signature");
    }
}

std::size_t Pool::diagram_index(const std::string& name) const {
    for (std::size_t i = 0; i < diagrams.size(); ++i)
        if (diagrams[i].name == name) return i;
    throw ReferenceError("diagram '" + name + "' is not in the pool");
}

Reasoner::Reasoner(const Pool& pool, TruthValue lambda) : pool_(&pool), lambda_(std::move(lambda)) {
    pool.validate();
    for (const auto& d : pool.diagrams) {
        Indices a;
        for (std::size_t c = 0; c < pool.concepts.size(); ++c)
            if (models(pool.concepts[c], d.map, lambda_, ModelMode::forall).holds) a.push_back(c);
        answers_.push_back(std::move(a));
    }
}

MultiMorphism Reasoner::bottom() const {
    if (pool_->concepts.empty()) throw PreconditionError("pool has no concepts");
    return fill(pool_->concepts.front(), pool_->concepts.front().algebra().bottom(), "bot");
}

MultiMorphism Reasoner::top() const {
    if (pool_->concepts.empty()) throw PreconditionError("pool has no concepts");
    return fill(pool_->concepts.front(), pool_->concepts.front().algebra().top(), "top");
}

MultiMorphism Reasoner::ans(const Indices& U) const {
    MultiMorphism acc = bottom();
    for (auto d : U)
        for (auto c : answers(d)) acc = pointwise(acc, pool_->concepts[c], Connective::join);
    return acc.permuted(pool_->concepts.front().attribute_names()).renamed("ans");
}

MultiMorphism Reasoner::mod(const Indices& U) const {
    MultiMorphism acc = top();
    for (auto d : U)
        for (auto c : answers(d)) acc = pointwise(acc, pool_->concepts[c], Connective::meet);
    return acc.permuted(pool_->concepts.front().attribute_names()).renamed("mod");
}

Indices Reasoner::box(const MultiMorphism& g) const {
    Indices out;
    for (std::size_t d = 0; d < answers_.size(); ++d)
        if (std::all_of(answers(d).begin(), answers(d).end(),
                        [&](std::size_t c) { return guarded_leq(pool_->concepts[c], g); }))
            out.push_back(d);
    return out;
}

Indices Reasoner::diamond(const MultiMorphism& g) const {
    Indices out;
    for (std::size_t d = 0; d < answers_.size(); ++d)
        if (std::any_of(answers(d).begin(), answers(d).end(),
                        [&](std::size_t c) { return guarded_leq(g, pool_->concepts[c]); }))
            out.push_back(d);
    return out;
}

MultiMorphism Reasoner::interior(const MultiMorphism& g) const {
    MultiMorphism acc = bottom();
    std::set<std::size_t> seen;
    for (const auto& a : answers_)
        for (auto c : a)
            if (seen.insert(c).second && guarded_leq(pool_->concepts[c], g))
                acc = pointwise(acc, pool_->concepts[c], Connective::join);
    return acc.permuted(pool_->concepts.front().attribute_names()).renamed("int(" + g.name() + ")");
}

MultiMorphism Reasoner::closure(const MultiMorphism& g) const {
    MultiMorphism acc = top();
    std::set<std::size_t> seen;
    for (const auto& a : answers_)
        for (auto c : a)
            if (seen.insert(c).second && guarded_leq(g, pool_->concepts[c]))
                acc = pointwise(acc, pool_->concepts[c], Connective::meet);
    return acc.permuted(pool_->concepts.front().attribute_names()).renamed("cl(" + g.name() + ")");
}

Indices Reasoner::consequences(const Indices& U) const {
    auto a = ans(U);
    Indices out;
    for (std::size_t d = 0; d < answers_.size(); ++d)
        if (std::all_of(answers(d).begin(), answers(d).end(),
                        [&](std::size_t c) { return guarded_leq(pool_->concepts[c], a); }))
            out.push_back(d);
    return out;
}

Indices Reasoner::codified(const Indices& U) const {
    auto m = mod(U);
    Indices out;
    for (std::size_t d = 0; d < answers_.size(); ++d)
        if (std::any_of(answers(d).begin(), answers(d).end(),
                        [&](std::size_t c) { return guarded_leq(m, pool_->concepts[c]); }))
            out.push_back(d);
    return out;
}

bool Reasoner::entails(const Indices& U, std::size_t diagram) const {
    if (diagram >= answers_.size()) throw ReferenceError("diagram index " + std::to_string(diagram) + " is not in the pool");
    for (auto u : U)
        if (u >= answers_.size()) throw ReferenceError("premise index " + std::to_string(u) + " is not in the pool");
    auto c = consequences(U);
    return std::binary_search(c.begin(), c.end(), diagram);
}

Indices ans_lambda(std::size_t diagram, const Pool& pool, const TruthValue& lambda) {
    return Reasoner(pool, lambda).answers(diagram);
}
Indices box(const MultiMorphism& g, const Pool& pool, const TruthValue& lambda) { return Reasoner(pool, lambda).box(g); }
Indices diamond(const MultiMorphism& g, const Pool& pool, const TruthValue& lambda) {
    return Reasoner(pool, lambda).diamond(g);
}
MultiMorphism interior(const MultiMorphism& g, const Pool& pool, const TruthValue& lambda) {
    return Reasoner(pool, lambda).interior(g);
}
MultiMorphism closure(const MultiMorphism& g, const Pool& pool, const TruthValue& lambda) {
    return Reasoner(pool, lambda).closure(g);
}
bool consequence(const Indices& U, std::size_t diagram, const Pool& pool, const TruthValue& lambda) {
    return Reasoner(pool, lambda).entails(U, diagram);
}

// ---- formulas ----

namespace {

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    Formula parse() {
        auto f = implication();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return f;
    }

private:
    using Ptr = std::shared_ptr<const Formula>;

    [[noreturn]] void fail(const std::string& msg) const {
        throw InputError("formula: " + msg + " at offset " + std::to_string(pos_));
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(const std::string& tok) {
        skip();
        if (s_.compare(pos_, tok.size(), tok) == 0) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }
    static Formula binary(Formula::Kind k, Formula a, Formula b) {
        Formula f;
        f.kind = k;
        f.args = {std::make_shared<const Formula>(std::move(a)), std::make_shared<const Formula>(std::move(b))};
        return f;
    }

    Formula implication() {
        auto lhs = disjunction();
        if (eat("->")) return binary(Formula::Kind::implies, std::move(lhs), implication());
        return lhs;
    }
    Formula disjunction() {
        auto f = conjunction();
        while (eat("|")) f = binary(Formula::Kind::join, std::move(f), conjunction());
        return f;
    }
    Formula conjunction() {
        auto f = product();
        while (eat("&")) f = binary(Formula::Kind::meet, std::move(f), product());
        return f;
    }
    Formula product() {
        auto f = unary();
        while (eat("*")) f = binary(Formula::Kind::tensor, std::move(f), unary());
        return f;
    }
    Formula unary() {
        for (auto [tok, kind] : {std::pair{"[I]", Formula::Kind::interior}, std::pair{"[C]", Formula::Kind::closure}})
            if (eat(tok)) {
                Formula f;
                f.kind = kind;
                f.args = {std::make_shared<const Formula>(unary())};
                return f;
            }
        if (eat("(")) {
            auto f = implication();
            if (!eat(")")) fail("expected ')'");
            return f;
        }
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                                    s_[pos_] == '.' || s_[pos_] == '\''))
            ++pos_;
        if (start == pos_) fail(pos_ < s_.size() ? "unexpected '" + std::string(1, s_[pos_]) + "'" : "unexpected end");
        Formula f;
        f.atom = s_.substr(start, pos_ - start);
        return f;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

const char* symbol(Formula::Kind k) {
    switch (k) {
        case Formula::Kind::tensor: return " * ";
        case Formula::Kind::implies: return " -> ";
        case Formula::Kind::meet: return " & ";
        case Formula::Kind::join: return " | ";
        default: return "";
    }
}

Connective connective_of(Formula::Kind k) {
    switch (k) {
        case Formula::Kind::tensor: return Connective::tensor;
        case Formula::Kind::implies: return Connective::implies;
        case Formula::Kind::meet: return Connective::meet;
        default: return Connective::join;
    }
}

std::vector<TruthValue> candidates(const Algebra& alg, const Pool& pool, const MultiMorphism& g) {
    if (auto c = alg.carrier()) return *c;
    std::vector<TruthValue> base{alg.bottom(), alg.top()};
    auto add = [&](std::vector<TruthValue>& xs, const TruthValue& v) {
        for (const auto& x : xs)
            if (alg.approx_equal(x, v)) return;
        xs.push_back(v);
    };
    for (const auto& v : g.values()) add(base, v);
    for (const auto& c : pool.concepts)
        for (const auto& v : c.values()) add(base, v);
    for (const auto& d : pool.diagrams)
        for (const auto& v : d.map.values()) add(base, v);
    std::vector<TruthValue> out = base;
    for (const auto& a : base)
        for (const auto& b : base)
            if (out.size() < 256) add(out, alg.equiv(a, b));
    return out;
}

struct RlEval {
    const Pool& pool;
    const Algebra& alg;
    std::vector<TruthValue> grid;

    bool holds(const Formula& f, const MultiMorphism& g, const TruthValue& lambda) const {
        switch (f.kind) {
            case Formula::Kind::atom: return alg.approx_leq(lambda, atom_degree(f, g));
            case Formula::Kind::interior:
                return holds(*f.args[0], Reasoner(pool, lambda).interior(g), lambda);
            case Formula::Kind::closure: return holds(*f.args[0], Reasoner(pool, lambda).closure(g), lambda);
            default:
                return alg.approx_leq(lambda,
                                      alg.eval(connective_of(f.kind), degree(*f.args[0], g), degree(*f.args[1], g)));
        }
    }

    TruthValue atom_degree(const Formula& f, const MultiMorphism& g) const {
        return similarity_degree(g, pool.diagrams[pool.diagram_index(f.atom)].map);
    }

    TruthValue degree(const Formula& f, const MultiMorphism& g) const {
        switch (f.kind) {
            case Formula::Kind::atom: return atom_degree(f, g);
            case Formula::Kind::interior:
            case Formula::Kind::closure: {
                TruthValue best = alg.bottom();
                for (const auto& l : grid)
                    if (holds(f, g, l)) best = alg.join(best, l);
                return best;
            }
            default: return alg.eval(connective_of(f.kind), degree(*f.args[0], g), degree(*f.args[1], g));
        }
    }
};

void require_atoms(const Formula& f, const Pool& pool) {
    if (f.kind == Formula::Kind::atom) pool.diagram_index(f.atom);
    for (const auto& a : f.args) require_atoms(*a, pool);
}

}  // namespace

Formula parse_formula(const std::string& text) { return Parser(text).parse(); }

std::string format_formula(const Formula& f) {
    switch (f.kind) {
        case Formula::Kind::atom: return f.atom;
        case Formula::Kind::interior: return "[I]" + format_formula(*f.args[0]);
        case Formula::Kind::closure: return "[C]" + format_formula(*f.args[0]);
        default: return "(" + format_formula(*f.args[0]) + symbol(f.kind) + format_formula(*f.args[1]) + ")";
    }
}

bool eval_rl(const Formula& phi, const MultiMorphism& g, const Pool& pool, const TruthValue& lambda) {
    require_atoms(phi, pool);
    const auto& alg = g.algebra();
    alg.require(lambda);
    RlEval ev{pool, alg, candidates(alg, pool, g)};
    return ev.holds(phi, g, lambda);
}

TruthValue rl_degree(const Formula& phi, const MultiMorphism& g, const Pool& pool) {
    require_atoms(phi, pool);
    const auto& alg = g.algebra();
    RlEval ev{pool, alg, candidates(alg, pool, g)};
    TruthValue best = alg.bottom();
    for (const auto& l : ev.grid)
        if (ev.holds(phi, g, l)) best = alg.join(best, l);
    return best;
}

}  // namespace osk
