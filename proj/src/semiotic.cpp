#include "omegasketch/semiotic.hpp"

#include <algorithm>
#include <functional>
#include <regex>
#include <set>
#include <sstream>

#include "omegasketch/errors.hpp"

namespace osk {

namespace {

bool contains(const std::vector<std::string>& xs, const std::string& x) {
    return std::find(xs.begin(), xs.end(), x) != xs.end();
}

bool leaves_less(const TruthValue& a, const TruthValue& b) {
    return std::lexicographical_compare(a.leaves().begin(), a.leaves().end(), b.leaves().begin(), b.leaves().end());
}

bool leaves_close(const TruthValue& a, const TruthValue& b, double eps = kEps) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > eps) return false;
    return true;
}

void insert_value(std::vector<TruthValue>& xs, const TruthValue& v) {
    for (const auto& x : xs)
        if (leaves_close(x, v)) return;
    xs.push_back(v);
}

struct BuiltinSpec {
    enum class Kind { diag, codiag, eq, rename, constant, connective } kind;
    std::size_t arity = 0;
    std::string sign;   // diag / codiag / eq; rename source
    std::string other;  // rename target
    bool top = true;
    Connective conn = Connective::tensor;
};

std::optional<BuiltinSpec> parse_builtin(const SignSystem& sys, const std::string& label) {
    using K = BuiltinSpec::Kind;
    if (label == "top" || label == "bot") return BuiltinSpec{K::constant, 0, sys.omega_sign, {}, label == "top", Connective::tensor};
    static const std::map<std::string, Connective> conns{
        {"otimes", Connective::tensor}, {"implies", Connective::implies}, {"meet", Connective::meet}, {"join", Connective::join}};
    if (auto it = conns.find(label); it != conns.end())
        return BuiltinSpec{K::connective, 2, sys.omega_sign, {}, true, it->second};
    auto known = [&](const std::string& s) { return s == sys.omega_sign || sys.library.ontology.contains(s); };
    static const std::regex fan(R"((co)?diag(\d+)_(.+))");
    std::smatch m;
    if (std::regex_match(label, m, fan)) {
        std::size_t n = std::stoul(m[2]);
        std::string sign = m[3];
        if (n < 1 || n > sys.max_arity || !known(sign) || Ontology::is_output(sign)) return std::nullopt;
        return BuiltinSpec{m[1].matched ? K::codiag : K::diag, n, sign, {}, true, Connective::tensor};
    }
    if (label.rfind("eq_", 0) == 0) {
        std::string sign = label.substr(3);
        if (known(sign) && !Ontology::is_output(sign)) return BuiltinSpec{K::eq, 2, sign, {}, true, Connective::tensor};
    }
    for (const auto& [a, b] : sys.library.auxiliary) {
        if (label == "r_" + a + "_" + b) return BuiltinSpec{K::rename, 1, a, b, true, Connective::tensor};
        if (label == "r_" + b + "_" + a) return BuiltinSpec{K::rename, 1, b, a, true, Connective::tensor};
    }
    return std::nullopt;
}

Word builtin_word(const BuiltinSpec& b, const std::string& omega) {
    using K = BuiltinSpec::Kind;
    switch (b.kind) {
        case K::diag: {
            Word w{b.sign};
            for (std::size_t i = 0; i < b.arity; ++i) w.push_back(b.sign + "+");
            return w;
        }
        case K::codiag: {
            Word w(b.arity, b.sign);
            w.push_back(b.sign + "+");
            return w;
        }
        case K::eq: return {b.sign, b.sign, omega + "+"};
        case K::rename: return {b.sign, b.other + "+"};
        case K::constant: return {omega + "+"};
        case K::connective: return {omega, omega, omega + "+"};
    }
    return {};
}

std::vector<std::string> positional(const char* prefix, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

// Sign sets with the Omega set computed once.
class Context {
public:
    explicit Context(const Semiotic& s) : s_(s), omega_(omega_set(s)) {}

    const Semiotic& semiotic() const { return s_; }
    const OmegaSet& omega() const { return omega_; }

    OmegaSet sign(const std::string& sign) const {
        if (sign == s_.system.omega_sign) return omega_;
        if (auto it = s_.model.signs.find(sign); it != s_.model.signs.end()) return it->second;
        for (const auto& [aux, principal] : s_.system.library.auxiliary)
            if (aux == sign)
                if (auto it = s_.model.signs.find(principal); it != s_.model.signs.end()) return it->second.renamed(sign);
        throw ReferenceError("sign '" + sign + "' has no interpretation");
    }

    Interpretation builtin(const BuiltinSpec& b) const {
        using K = BuiltinSpec::Kind;
        const Algebra& alg = s_.model.algebra;
        auto attrs_of = [](const OmegaSet& w, const std::vector<std::string>& names) {
            std::vector<Attribute> out;
            for (const auto& n : names) out.push_back({n, w});
            return out;
        };
        switch (b.kind) {
            case K::diag:
            case K::codiag: {
                OmegaSet w = sign(b.sign);
                auto many = positional(b.kind == K::diag ? "out" : "in", b.arity);
                std::vector<std::string> one{b.kind == K::diag ? "in0" : "out0"};
                std::vector<Attribute> attrs = attrs_of(w, b.kind == K::diag ? one : many);
                for (auto& a : attrs_of(w, b.kind == K::diag ? many : one)) attrs.push_back(std::move(a));
                auto name = (b.kind == K::diag ? "diag" : "codiag") + std::to_string(b.arity) + "_" + b.sign;
                auto fn = [&](std::span<const std::size_t> idx) {
                    // the single end sits first for diag, last for codiag
                    std::size_t hub = b.kind == K::diag ? idx[0] : idx[b.arity];
                    std::size_t lo = b.kind == K::diag ? 1 : 0;
                    TruthValue v = alg.top();
                    for (std::size_t k = 0; k < b.arity; ++k) v = alg.tensor(v, w.sim(hub, idx[lo + k]));
                    return v;
                };
                return {MultiMorphism::tabulate(name, attrs, b.kind == K::diag ? one : many,
                                                b.kind == K::diag ? many : one, alg, fn),
                        false};
            }
            case K::eq: {
                OmegaSet w = sign(b.sign);
                return {MultiMorphism::tabulate("eq_" + b.sign, attrs_of(w, {"in0", "in1"}), {"in0", "in1"}, {}, alg,
                                                [&](std::span<const std::size_t> idx) { return w.sim(idx[0], idx[1]); }),
                        true};
            }
            case K::rename: {
                OmegaSet from = sign(b.sign);
                OmegaSet to = sign(b.other);
                if (from.support() != to.support())
                    throw ShapeError("rename '" + b.sign + "' to '" + b.other + "' needs equal supports");
                auto id = identity(from, "in0", "out0");
                std::vector<Attribute> attrs{{"in0", from}, {"out0", to}};
                return {MultiMorphism("r_" + b.sign + "_" + b.other, alg, attrs, {"in0"}, {"out0"}, id.values()), false};
            }
            case K::constant:
                return {MultiMorphism::constant(b.top ? "top" : "bot", {}, {}, {}, b.top ? alg.top() : alg.bottom(), alg),
                        true};
            case K::connective:
                return {MultiMorphism::tabulate(to_string(b.conn), attrs_of(omega_, {"in0", "in1"}), {"in0", "in1"}, {},
                                                alg,
                                                [&](std::span<const std::size_t> idx) {
                                                    return alg.eval(b.conn, omega_value(idx[0]), omega_value(idx[1]));
                                                }),
                        true};
        }
        throw ReferenceError("unknown builtin");
    }

    Interpretation component(const std::string& label) const {
        if (auto it = s_.model.components.find(label); it != s_.model.components.end()) return it->second;
        if (auto b = parse_builtin(s_.system, label)) return builtin(*b);
        throw ReferenceError("component '" + label + "' has no interpretation");
    }

    MultiMorphism lifted(const std::string& label) const {
        auto in = component(label);
        const auto& m = in.map;
        std::map<std::string, std::string> names;
        for (std::size_t k = 0; k < m.sources().size(); ++k) names[m.sources()[k]] = "in" + std::to_string(k);
        for (std::size_t k = 0; k < m.targets().size(); ++k) names[m.targets()[k]] = "out" + std::to_string(k);
        std::vector<std::string> order = m.sources();
        order.insert(order.end(), m.targets().begin(), m.targets().end());
        for (const auto& a : m.attributes())
            if (!names.count(a.name)) throw ShapeError("component '" + label + "' has undesignated attribute '" + a.name + "'");
        auto base = m.permuted(order).rename_attributes(names).renamed(label);
        if (!in.omega_valued) return base;
        if (!base.targets().empty()) throw ShapeError("Omega-valued component '" + label + "' must not have targets");
        const Algebra& alg = s_.model.algebra;
        std::vector<Attribute> attrs = base.attributes();
        attrs.push_back({"out0", omega_});
        const std::size_t r = base.rank();
        return MultiMorphism::tabulate(label, attrs, base.sources(), {"out0"}, alg,
                                       [&](std::span<const std::size_t> idx) {
                                           return alg.equiv(base.at(idx.first(r)), omega_value(idx[r]));
                                       });
    }

    MultiDiagram diagram(const Configuration& d) const {
        d.graph.validate();
        MultiDiagram md;
        md.graph = d.graph;
        for (const auto& v : d.graph.vertices) md.vertex_sets.emplace(v.id, sign(v.sign));
        for (const auto& a : d.graph.arrows) md.arrow_maps.emplace(a.id, lifted(a.label));
        auto b = boundary(d);
        md.sources = d.sources.empty() ? b.input_vertices : d.sources;
        std::vector<std::string> targets = d.targets.empty() ? b.output_vertices : d.targets;
        for (const auto& t : targets)
            if (!contains(md.sources, t)) md.targets.push_back(t);
        md.validate();
        return md;
    }

    const TruthValue& omega_value(std::size_t i) const { return grid_.at(i); }

    void set_grid(std::vector<TruthValue> g) { grid_ = std::move(g); }

private:
    const Semiotic& s_;
    OmegaSet omega_;
    std::vector<TruthValue> grid_;
};

Context make_context(const Semiotic& s) {
    Context c(s);
    c.set_grid(omega_grid(s));
    return c;
}

struct TotalityResult {
    bool total = true;
    std::string witness;
};

TotalityResult totality(const MultiDiagram& md, const EvalOptions& opts) {
    const Algebra& alg = md.algebra();
    auto L = projected_limit(md, md.sources, opts);
    for (std::size_t i = 0; i < L.cell_count(); ++i) {
        auto idx = L.unflatten(i);
        TruthValue ext = alg.top();
        for (std::size_t k = 0; k < idx.size(); ++k) ext = alg.tensor(ext, L.attributes()[k].set.extent(idx[k]));
        if (!alg.approx_equal(L.value(i), ext))
            return {false, L.tuple_label(i) + ": limit " + alg.format(L.value(i)) + ", extent " + alg.format(ext)};
    }
    return {};
}

MultiMorphism boundary_map(const Context& ctx, const Configuration& d, std::vector<std::string> ins,
                           std::vector<std::string> outs, bool use_colimit, const EvalOptions& opts) {
    auto md = ctx.diagram(d);
    std::vector<std::string> keep = ins;
    for (const auto& o : outs)
        if (!contains(keep, o)) keep.push_back(o);
    MultiMorphism m = [&] {
        if (!use_colimit) return projected_limit(md, keep, opts);
        auto full = colimit(md, opts);
        std::vector<std::string> hidden;
        for (const auto& v : md.graph.vertices)
            if (!contains(keep, v.id)) hidden.push_back(v.id);
        return marginalize(full, hidden);
    }();
    std::vector<std::string> targets;
    for (const auto& o : outs)
        if (!contains(ins, o)) targets.push_back(o);
    return m.permuted(keep).with_designation(ins, targets).renamed("M(" + d.name + ")");
}

std::string producer(const Configuration& d, const std::string& vid) {
    for (const auto& a : d.graph.arrows)
        if (contains(a.targets, vid)) return a.label;
    return {};
}

}  // namespace

std::vector<TruthValue> omega_grid(const Semiotic& s) {
    const Algebra& alg = s.model.algebra;
    std::vector<TruthValue> xs;
    if (!s.model.omega_grid.empty()) {
        for (const auto& v : s.model.omega_grid) {
            alg.require(v);
            insert_value(xs, v);
        }
    } else {
        insert_value(xs, alg.bottom());
        insert_value(xs, alg.top());
        for (const auto& [_, w] : s.model.signs)
            for (std::size_t i = 0; i < w.size(); ++i)
                for (std::size_t j = 0; j < w.size(); ++j) insert_value(xs, w.sim(i, j));
        for (const auto& [_, c] : s.model.components)
            if (c.omega_valued)
                for (const auto& v : c.map.values()) insert_value(xs, v);
        std::sort(xs.begin(), xs.end(), leaves_less);
        // closure in rounds, so shallow values win when the cap is hit
        for (bool grew = true; grew && xs.size() < kMaxOmegaGrid;) {
            grew = false;
            std::vector<TruthValue> next = xs;
            for (const auto& a : xs)
                for (const auto& b : xs)
                    for (Connective c : {Connective::implies, Connective::meet, Connective::join}) {
                        std::size_t before = next.size();
                        insert_value(next, alg.eval(c, a, b));
                        grew = grew || next.size() > before;
                    }
            std::vector<TruthValue> added(next.begin() + static_cast<std::ptrdiff_t>(xs.size()), next.end());
            std::sort(added.begin(), added.end(), leaves_less);
            for (const auto& v : added)
                if (xs.size() < kMaxOmegaGrid) xs.push_back(v);
        }
    }
    if (xs.size() > kMaxOmegaGrid) xs.resize(kMaxOmegaGrid);
    std::sort(xs.begin(), xs.end(), leaves_less);
    return xs;
}

OmegaSet omega_set(const Semiotic& s) {
    const Algebra& alg = s.model.algebra;
    auto grid = omega_grid(s);
    std::vector<std::string> labels;
    for (const auto& v : grid) {
        std::string l = alg.format(v);
        std::string u = l;
        for (int k = 2; contains(labels, u); ++k) u = l + "#" + std::to_string(k);
        labels.push_back(u);
    }
    std::vector<TruthValue> sim;
    for (const auto& a : grid)
        for (const auto& b : grid) sim.push_back(alg.equiv(a, b));
    return OmegaSet(s.system.omega_sign, labels, std::move(sim), alg);
}

bool is_builtin(const SignSystem& sys, const std::string& label) { return parse_builtin(sys, label).has_value(); }

Library effective_library(const SignSystem& sys) {
    Library lib = sys.library;
    lib.ontology.add(sys.omega_sign);
    auto add = [&](const std::string& label) {
        if (lib.has(label)) return;
        if (auto b = parse_builtin(sys, label)) lib.components[label] = builtin_word(*b, sys.omega_sign);
    };
    for (const auto& s : lib.ontology.inputs()) {
        for (std::size_t n = 1; n <= sys.max_arity; ++n) {
            add("diag" + std::to_string(n) + "_" + s);
            add("codiag" + std::to_string(n) + "_" + s);
        }
        add("eq_" + s);
    }
    for (const auto& [a, b] : sys.library.auxiliary) {
        add("r_" + a + "_" + b);
        add("r_" + b + "_" + a);
    }
    for (const char* l : {"top", "bot", "otimes", "implies", "meet", "join"}) add(l);
    return lib;
}

Interpretation builtin_interpretation(const Semiotic& s, const std::string& label) {
    auto b = parse_builtin(s.system, label);
    if (!b) throw ReferenceError("'" + label + "' is not a builtin component");
    return make_context(s).builtin(*b);
}

OmegaSet sign_set(const Semiotic& s, const std::string& sign) { return make_context(s).sign(sign); }

Interpretation component_interpretation(const Semiotic& s, const std::string& label) {
    return make_context(s).component(label);
}

MultiMorphism lifted_map(const Semiotic& s, const std::string& label) { return make_context(s).lifted(label); }

MultiDiagram instantiate(const Semiotic& s, const Configuration& d) { return make_context(s).diagram(d); }

MultiMorphism interpret(const Semiotic& s, const Configuration& d, const InterpretOptions& opts) {
    auto b = boundary(d);
    return boundary_map(make_context(s), d, b.input_vertices, b.output_vertices, opts.colimit, opts.eval);
}

MultiMorphism relation_map(const Semiotic& s, const Configuration& d, const EvalOptions& opts) {
    auto ctx = make_context(s);
    auto b = boundary(d);
    if (b.output_vertices.size() != 1 || d.graph.vertex(b.output_vertices[0]).sign != s.system.omega_sign)
        throw PreconditionError("'" + d.name + "' is not a relation: it needs a single output vertex of sign '" +
                                s.system.omega_sign + "'");
    const auto& out = b.output_vertices[0];
    if (contains(b.input_vertices, out)) throw PreconditionError("output vertex '" + out + "' is isolated");
    auto m = boundary_map(ctx, d, b.input_vertices, b.output_vertices, false, opts);
    const Algebra& alg = s.model.algebra;
    std::size_t top = SIZE_MAX;
    for (std::size_t i = 0; i < ctx.omega().size(); ++i)
        if (alg.is_top(ctx.omega_value(i))) top = i;
    std::vector<Attribute> attrs;
    for (const auto& v : b.input_vertices) attrs.push_back(m.attribute(v));
    return MultiMorphism::tabulate("rel(" + d.name + ")", attrs, b.input_vertices, {}, alg,
                                   [&](std::span<const std::size_t> idx) {
                                       std::vector<std::size_t> full(idx.begin(), idx.end());
                                       full.push_back(top);
                                       return m.at(full);
                                   });
}

bool ModelReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const ModelCheck& c) { return c.passed || c.advisory; });
}

std::vector<const ModelCheck*> ModelReport::failures() const {
    std::vector<const ModelCheck*> out;
    for (const auto& c : checks)
        if (!c.passed && !c.advisory) out.push_back(&c);
    return out;
}

ModelReport validate_model(const Semiotic& s, const ValidateOptions& opts) {
    ModelReport rep;
    auto ctx = make_context(s);
    const auto& sys = s.system;
    const Algebra& alg = s.model.algebra;
    const Library lib = effective_library(sys);
    auto add = [&](std::string kind, std::string subject, bool passed, std::string detail = {}, bool advisory = false) {
        rep.checks.push_back({std::move(kind), std::move(subject), passed, advisory && !passed, std::move(detail)});
    };
    // Runs a check body; evaluation errors become failed checks, missing interpretations propagate.
    auto guarded = [&](const std::string& kind, const std::string& subject, const std::function<void()>& body) {
        try {
            body();
        } catch (const ReferenceError&) {
            throw;
        } catch (const Error& e) {
            add(kind, subject, false, e.what());
        }
    };

    for (const auto& p : lib.problems()) add("library", "library", false, p);

    // every sign and component of the library interpreted with matching supports
    for (const auto& sign : sys.library.ontology.inputs()) {
        if (sign == sys.omega_sign) continue;
        ctx.sign(sign);
    }
    for (const auto& [label, word] : sys.library.components) {
        guarded("signature", label, [&] {
            auto in = ctx.component(label);
            auto m = ctx.lifted(label);
            auto io = word_io(word);
            std::string problem;
            if (m.sources().size() != io.inputs.size() || m.targets().size() != io.outputs.size())
                problem = "word '" + format_word(word) + "' has " + std::to_string(io.inputs.size()) + " inputs and " +
                          std::to_string(io.outputs.size()) + " outputs";
            for (std::size_t k = 0; problem.empty() && k < io.inputs.size(); ++k)
                if (m.attribute(m.sources()[k]).set.support() != ctx.sign(io.inputs[k]).support())
                    problem = "input " + std::to_string(k) + " does not range over '" + io.inputs[k] + "'";
            for (std::size_t k = 0; problem.empty() && k < io.outputs.size(); ++k) {
                auto sign = Ontology::dual(io.outputs[k]);
                if (m.attribute(m.targets()[k]).set.support() != ctx.sign(sign).support())
                    problem = "output " + std::to_string(k) + " does not range over '" + sign + "'";
            }
            if (in.omega_valued && (io.outputs.size() != 1 || Ontology::dual(io.outputs[0]) != sys.omega_sign))
                problem = "Omega-valued interpretation for a word without a single '" + sys.omega_sign + "+' output";
            add("signature", label, problem.empty(), problem);
        });
    }

    for (const auto& [a, b] : sys.library.equiv_labels) {
        guarded("equivalence", a + " ~ " + b, [&] {
            auto diff = first_difference(ctx.lifted(a), ctx.lifted(b));
            add("equivalence", a + " ~ " + b, !diff, diff.value_or(""));
        });
    }

    for (const auto& [w1, w2] : sys.library.equiv_words) {
        auto subject = format_word(w1) + " ~ " + format_word(w2);
        guarded("word", subject, [&] {
            auto product_of_word = [&](const Word& w) {
                std::vector<OmegaSet> parts;
                for (const auto& sign : w) parts.push_back(ctx.sign(Ontology::is_output(sign) ? Ontology::dual(sign) : sign));
                return product(parts);
            };
            auto p1 = product_of_word(w1);
            auto p2 = product_of_word(w2);
            bool same = p1.support() == p2.support();
            for (std::size_t i = 0; same && i < p1.size(); ++i)
                for (std::size_t j = 0; same && j < p1.size(); ++j) same = alg.approx_equal(p1.sim(i, j), p2.sim(i, j));
            add("word", subject, same, same ? "" : "products differ");
        });
    }

    for (const auto& [lo, hi] : sys.library.ontology.order_pairs()) {
        if (lo == sys.omega_sign || hi == sys.omega_sign) continue;
        auto subject = lo + " <= " + hi;
        guarded("ontology", subject, [&] {
            auto a = ctx.sign(lo);
            auto b = ctx.sign(hi);
            std::string witness;
            for (std::size_t i = 0; i < a.size() && witness.empty(); ++i) {
                auto bi = b.find(a.label(i));
                if (!bi) continue;
                for (std::size_t j = 0; j < a.size() && witness.empty(); ++j) {
                    auto bj = b.find(a.label(j));
                    if (bj && !alg.approx_leq(a.sim(i, j), b.sim(*bi, *bj)))
                        witness = "[" + a.label(i) + "=" + a.label(j) + "]: " + alg.format(a.sim(i, j)) + " > " +
                                  alg.format(b.sim(*bi, *bj));
                }
            }
            add("ontology", subject, witness.empty(), witness);
        });
    }

    for (const auto& [label, in] : s.model.components) {
        if (in.omega_valued || !sys.library.has(label)) continue;
        guarded("epi", label, [&] {
            auto m = ctx.lifted(label);
            if (m.sources().empty() || m.targets().empty()) return;
            bool epi = classify(m).epi;
            add("epi", label, epi, epi ? "" : "r° ⊗ [w] ⊗ r differs from [w']", !opts.strict);
        });
    }

    for (const auto& d : sys.E) {
        guarded("e-totality", d.name, [&] {
            auto cfg = validate_configuration(d, lib);
            if (!cfg.valid) {
                add("e-totality", d.name, false, cfg.violations.front());
                return;
            }
            auto t = totality(ctx.diagram(d), opts.eval);
            add("e-totality", d.name, t.total, t.witness);
        });
    }

    auto universal = [&](const Constraint& c, bool co) {
        const char* kind = co ? "cou-colimit" : "u-limit";
        guarded(kind, c.component, [&] {
            auto cfg = validate_configuration(c.diagram, lib);
            if (!cfg.valid) {
                add(kind, c.component, false, cfg.violations.front());
                return;
            }
            auto b = boundary(c.diagram);
            auto ins = c.inputs.empty() ? b.input_vertices : c.inputs;
            auto outs = c.outputs.empty() ? b.output_vertices : c.outputs;
            auto lim = boundary_map(ctx, c.diagram, ins, outs, co, opts.eval);
            auto f = ctx.lifted(c.component);
            if (f.sources().size() != ins.size() || f.targets().size() != outs.size()) {
                add(kind, c.component, false, "boundary does not match the component word");
                return;
            }
            std::map<std::string, std::string> names;
            for (std::size_t k = 0; k < ins.size(); ++k) names[ins[k]] = "in" + std::to_string(k);
            for (std::size_t k = 0; k < outs.size(); ++k) names[outs[k]] = "out" + std::to_string(k);
            auto diff = first_difference(f, lim.rename_attributes(names));
            add(kind, c.component, !diff, diff.value_or(""));
        });
    };
    for (const auto& c : sys.U) universal(c, false);
    for (const auto& c : sys.coU) universal(c, true);
    return rep;
}

WordClass classify_word(const Semiotic& s, const Configuration& d, const EvalOptions& opts) {
    const auto& omega = s.system.omega_sign;
    WordClass wc;
    auto b = boundary(d);
    wc.relation = b.output_vertices.size() == 1 && d.graph.vertex(b.output_vertices[0]).sign == omega;
    if (!wc.relation) {
        wc.detail = "output boundary is not a single '" + omega + "' vertex";
        return wc;
    }
    const auto& out = b.output_vertices[0];
    auto is_eq = [](const std::string& l) { return l.rfind("eq_", 0) == 0; };
    std::string top_label = producer(d, out);
    if (is_eq(top_label)) {
        wc.equation = true;
    } else if (std::regex_match(top_label, std::regex("codiag[0-9]+_" + omega))) {
        wc.equation = true;
        for (const auto& a : d.graph.arrows)
            if (contains(a.targets, out))
                for (const auto& v : a.sources) {
                    auto p = producer(d, v);
                    wc.equation = wc.equation && (p == "top" || is_eq(p));
                }
    }

    // D ⊗ ⊤ ⊗ codiag2
    Configuration aug = d;
    auto taken = [&](const std::string& id) { return aug.graph.vertex_index(id).has_value(); };
    std::string t = "t", u = "u";
    while (taken(t)) t += "'";
    aug.graph.vertices.push_back({t, omega});
    while (taken(u)) u += "'";
    aug.graph.vertices.push_back({u, omega});
    auto arrow_taken = [&](const std::string& id) {
        return std::any_of(aug.graph.arrows.begin(), aug.graph.arrows.end(), [&](const Arrow& a) { return a.id == id; });
    };
    std::string at = "truth.top", ac = "truth.codiag";
    while (arrow_taken(at)) at += "'";
    while (arrow_taken(ac)) ac += "'";
    aug.graph.arrows.push_back({at, "top", {}, {t}});
    aug.graph.arrows.push_back({ac, "codiag2_" + omega, {out, t}, {u}});
    if (aug.sources.empty()) aug.sources = b.input_vertices;
    aug.targets.clear();
    auto ctx = make_context(s);
    auto res = totality(ctx.diagram(aug), opts);
    wc.truth = res.total;
    wc.detail = res.witness;
    return wc;
}

Configuration lift_connective(const Semiotic& s, const Configuration& d0, const Configuration& d1, Connective conn,
                              const std::vector<std::pair<std::string, std::string>>& links) {
    const auto& omega = s.system.omega_sign;
    std::string label;
    switch (conn) {
        case Connective::tensor: label = "otimes"; break;
        case Connective::implies: label = "implies"; break;
        case Connective::meet: label = "meet"; break;
        case Connective::join: label = "join"; break;
        case Connective::equiv: throw UnsupportedOperation("no builtin component for equiv");
    }
    auto b0 = boundary(d0);
    auto b1 = boundary(d1);
    for (const auto* b : {&b0, &b1})
        if (b->output_vertices.size() != 1 || b->outputs[0] != omega + "+")
            throw PreconditionError("connective lifting needs relations with a single '" + omega + "' output");

    Configuration out;
    out.name = d0.name + " " + label + " " + d1.name;
    out.graph = d0.graph;
    auto vtaken = [&](const std::string& id) { return out.graph.vertex_index(id).has_value(); };
    auto ataken = [&](const std::string& id) {
        return std::any_of(out.graph.arrows.begin(), out.graph.arrows.end(), [&](const Arrow& a) { return a.id == id; });
    };
    auto fresh = [](std::string id, const std::function<bool(const std::string&)>& taken) {
        while (taken(id)) id += "'";
        return id;
    };
    std::map<std::string, std::string> vmap;
    for (const auto& v : d1.graph.vertices) {
        vmap[v.id] = fresh(v.id, vtaken);
        out.graph.vertices.push_back({vmap[v.id], v.sign});
    }
    for (const auto& a : d1.graph.arrows) {
        Arrow n{fresh(a.id, ataken), a.label, {}, {}};
        for (const auto& x : a.sources) n.sources.push_back(vmap.at(x));
        for (const auto& x : a.targets) n.targets.push_back(vmap.at(x));
        out.graph.arrows.push_back(std::move(n));
    }

    std::set<std::string> linked;
    for (std::size_t k = 0; k < links.size(); ++k) {
        const auto& [a, b] = links[k];
        if (!contains(b0.input_vertices, a)) throw ReferenceError("'" + a + "' is not an input vertex of '" + d0.name + "'");
        if (!contains(b1.input_vertices, b)) throw ReferenceError("'" + b + "' is not an input vertex of '" + d1.name + "'");
        const auto& sign = d0.graph.vertex(a).sign;
        if (d1.graph.vertex(b).sign != sign)
            throw ShapeError("linked vertices '" + a + "' and '" + b + "' carry different signs");
        auto id = fresh(a, vtaken);
        out.graph.vertices.push_back({id, sign});
        out.graph.arrows.push_back({fresh("link" + std::to_string(k), ataken), "diag2_" + sign, {id}, {a, vmap.at(b)}});
        out.sources.push_back(id);
        linked.insert(a);
        linked.insert(vmap.at(b));
    }
    for (const auto& v : b0.input_vertices)
        if (!linked.count(v)) out.sources.push_back(v);
    for (const auto& v : b1.input_vertices)
        if (!linked.count(vmap.at(v))) out.sources.push_back(vmap.at(v));
    auto v = fresh("v", vtaken);
    out.graph.vertices.push_back({v, omega});
    out.graph.arrows.push_back({fresh(label, ataken), label, {b0.output_vertices[0], vmap.at(b1.output_vertices[0])}, {v}});
    return out;
}

namespace {

std::string rename_sign_in(const std::string& sign, const std::string& from, const std::string& to) {
    if (sign == from) return to;
    if (sign == from + "+") return to + "+";
    return sign;
}

std::string rename_label(const std::string& label, const std::string& from, const std::string& to) {
    static const std::regex fan(R"(((?:co)?diag\d+_|eq_)(.+))");
    std::smatch m;
    if (std::regex_match(label, m, fan) && m[2] == from) return m[1].str() + to;
    return label;
}

Configuration rename_config(Configuration d, const std::string& from, const std::string& to) {
    for (auto& v : d.graph.vertices) v.sign = rename_sign_in(v.sign, from, to);
    for (auto& a : d.graph.arrows) a.label = rename_label(a.label, from, to);
    return d;
}

// Meet of the per-part embeddings: component j holds vals[j], absent parts stay top.
TruthValue tuple_value(const Algebra& prod, const std::vector<std::optional<TruthValue>>& vals) {
    TruthValue out = prod.top();
    for (std::size_t j = 0; j < vals.size(); ++j)
        if (vals[j]) out = prod.meet(out, prod.embed(j, *vals[j], Padding::top));
    return out;
}

}  // namespace

Semiotic integrate(const std::vector<Semiotic>& parts) {
    if (parts.empty()) throw PreconditionError("integration needs at least one semiotic");
    const std::string omega = parts.front().system.omega_sign;
    const std::size_t n = parts.size();
    std::vector<Algebra> algs;
    for (const auto& p : parts) algs.push_back(p.model.algebra);
    const Algebra prod = Algebra::product_of(algs);

    Semiotic out;
    out.system.omega_sign = omega;
    out.system.max_arity = 0;

    // library union
    std::vector<std::string> inputs;
    std::vector<std::pair<std::string, std::string>> order;
    for (const auto& p : parts) {
        const auto& from = p.system.omega_sign;
        for (const auto& s : p.system.library.ontology.inputs())
            if (!contains(inputs, rename_sign_in(s, from, omega))) inputs.push_back(rename_sign_in(s, from, omega));
        for (const auto& [a, b] : p.system.library.ontology.order_pairs())
            order.emplace_back(rename_sign_in(a, from, omega), rename_sign_in(b, from, omega));
    }
    try {
        out.system.library.ontology = Ontology(inputs, order);
    } catch (const ShapeError& e) {
        throw IntegrationError(std::string("ontologies do not combine: ") + e.what());
    }
    for (const auto& p : parts) {
        const auto& from = p.system.omega_sign;
        auto& lib = out.system.library;
        for (const auto& [label, word] : p.system.library.components) {
            Word w;
            for (const auto& s : word) w.push_back(rename_sign_in(s, from, omega));
            auto [it, fresh] = lib.components.emplace(label, w);
            if (!fresh && it->second != w)
                throw IntegrationError("component '" + label + "' has word '" + format_word(it->second) + "' and '" +
                                       format_word(w) + "'");
        }
        for (const auto& e : p.system.library.equiv_labels)
            if (std::find(lib.equiv_labels.begin(), lib.equiv_labels.end(), e) == lib.equiv_labels.end())
                lib.equiv_labels.push_back(e);
        for (const auto& [w1, w2] : p.system.library.equiv_words) {
            Word a, b;
            for (const auto& s : w1) a.push_back(rename_sign_in(s, from, omega));
            for (const auto& s : w2) b.push_back(rename_sign_in(s, from, omega));
            lib.equiv_words.emplace_back(a, b);
        }
        for (const auto& e : p.system.library.auxiliary)
            if (std::find(lib.auxiliary.begin(), lib.auxiliary.end(), e) == lib.auxiliary.end()) lib.auxiliary.push_back(e);
        for (const auto& d : p.system.E) out.system.E.push_back(rename_config(d, from, omega));
        for (auto c : p.system.U) {
            c.diagram = rename_config(c.diagram, from, omega);
            out.system.U.push_back(std::move(c));
        }
        for (auto c : p.system.coU) {
            c.diagram = rename_config(c.diagram, from, omega);
            out.system.coU.push_back(std::move(c));
        }
        out.system.max_arity = std::max(out.system.max_arity, p.system.max_arity);
    }

    out.model.algebra = prod;

    // signs: equal interpretations required where shared
    std::set<std::string> sign_names;
    for (const auto& p : parts)
        for (const auto& [name, _] : p.model.signs)
            if (name != p.system.omega_sign) sign_names.insert(name);
    for (const auto& name : sign_names) {
        const OmegaSet* first = nullptr;
        std::vector<const OmegaSet*> per(n, nullptr);
        for (std::size_t j = 0; j < n; ++j) {
            auto it = parts[j].model.signs.find(name);
            if (it == parts[j].model.signs.end()) continue;
            per[j] = &it->second;
            if (!first) {
                first = per[j];
                continue;
            }
            bool same = first->support() == per[j]->support();
            for (std::size_t a = 0; same && a < first->size(); ++a)
                for (std::size_t b = 0; same && b < first->size(); ++b)
                    same = leaves_close(first->sim(a, b), per[j]->sim(a, b));
            if (!same) throw IntegrationError("sign '" + name + "' is interpreted differently by the integrated semiotics");
        }
        std::vector<TruthValue> sim;
        for (std::size_t a = 0; a < first->size(); ++a)
            for (std::size_t b = 0; b < first->size(); ++b) {
                std::vector<std::optional<TruthValue>> vals(n);
                for (std::size_t j = 0; j < n; ++j)
                    if (per[j]) vals[j] = per[j]->sim(a, b);
                sim.push_back(tuple_value(prod, vals));
            }
        out.model.signs.emplace(name, OmegaSet(name, first->support(), std::move(sim), prod));
    }

    // Omega grid: full product when small, otherwise the embedded grids
    std::vector<std::vector<TruthValue>> grids;
    std::size_t total = 1;
    for (const auto& p : parts) {
        grids.push_back(omega_grid(p));
        total *= grids.back().size();
    }
    if (total <= kMaxOmegaGrid) {
        std::vector<std::size_t> idx(n, 0);
        for (std::size_t c = 0; c < total; ++c) {
            std::vector<std::optional<TruthValue>> vals(n);
            for (std::size_t j = 0; j < n; ++j) vals[j] = grids[j][idx[j]];
            out.model.omega_grid.push_back(tuple_value(prod, vals));
            for (std::size_t j = n; j-- > 0;) {
                if (++idx[j] < grids[j].size()) break;
                idx[j] = 0;
            }
        }
    } else {
        insert_value(out.model.omega_grid, prod.bottom());
        insert_value(out.model.omega_grid, prod.top());
        for (std::size_t j = 0; j < n; ++j)
            for (const auto& g : grids[j]) insert_value(out.model.omega_grid, prod.embed(j, g, Padding::top));
    }

    // components: values tupled across the parts that interpret them
    std::set<std::string> labels;
    for (const auto& p : parts)
        for (const auto& [label, _] : p.model.components) labels.insert(label);
    for (const auto& label : labels) {
        std::vector<const Interpretation*> per(n, nullptr);
        const Interpretation* first = nullptr;
        for (std::size_t j = 0; j < n; ++j) {
            auto it = parts[j].model.components.find(label);
            if (it == parts[j].model.components.end()) continue;
            per[j] = &it->second;
            if (!first) {
                first = per[j];
                continue;
            }
            bool same = first->omega_valued == per[j]->omega_valued && first->map.shape() == per[j]->map.shape();
            for (std::size_t i = 0; same && i < first->map.cell_count(); ++i)
                same = leaves_close(first->map.value(i), per[j]->map.value(i));
            if (!same)
                throw IntegrationError("component '" + label + "' is interpreted differently by the integrated semiotics");
        }
        std::vector<Attribute> attrs;
        for (const auto& a : first->map.attributes()) {
            std::size_t owner = 0;
            while (!per[owner]) ++owner;
            // attributes carry the integrated set of the sign with the same support
            const OmegaSet* lifted = nullptr;
            for (const auto& [name, w] : out.model.signs)
                if (w.support() == a.set.support() && (name == a.set.name() || !lifted)) lifted = &w;
            if (a.set.name() == parts[owner].system.omega_sign)
                throw UnsupportedOperation("component '" + label + "' ranges over the Omega sign; give it Omega-valued");
            if (!lifted) throw IntegrationError("component '" + label + "': attribute '" + a.name + "' has no integrated sign");
            attrs.push_back({a.name, *lifted});
        }
        std::vector<TruthValue> vals;
        for (std::size_t i = 0; i < first->map.cell_count(); ++i) {
            std::vector<std::optional<TruthValue>> v(n);
            for (std::size_t j = 0; j < n; ++j)
                if (per[j]) v[j] = per[j]->map.value(i);
            vals.push_back(tuple_value(prod, v));
        }
        out.model.components.emplace(
            label, Interpretation{MultiMorphism(label, prod, attrs, first->map.sources(), first->map.targets(), vals),
                                  first->omega_valued});
    }
    return out;
}

MultiMorphism integration_schema_colimit(const std::vector<MultiMorphism>& vertices,
                                         const std::vector<MultiMorphism>& arrows) {
    if (vertices.empty()) throw PreconditionError("integration schema has no vertices");
    MultiMorphism acc = vertices.front();
    for (std::size_t i = 1; i < vertices.size(); ++i) acc = pointwise(acc, vertices[i], Connective::tensor);
    if (!arrows.empty()) {
        MultiMorphism any = arrows.front();
        for (std::size_t i = 1; i < arrows.size(); ++i) any = pointwise(any, arrows[i], Connective::join);
        for (const auto& a : any.attributes())
            if (!acc.attribute_index(a.name))
                throw ShapeError("arrow attribute '" + a.name + "' is not carried by any schema vertex");
        acc = pointwise(acc, any, Connective::tensor);
    }
    return acc.renamed("coLim");
}

std::string encode_string(const Configuration& d) {
    d.graph.validate();
    // arrows in dependency order; cycles keep declaration order
    std::set<std::string> ready;
    for (const auto& v : d.graph.vertices)
        if (!d.graph.has_incoming(v.id)) ready.insert(v.id);
    std::vector<const Arrow*> order;
    std::vector<bool> done(d.graph.arrows.size(), false);
    for (bool progress = true; progress;) {
        progress = false;
        for (std::size_t i = 0; i < d.graph.arrows.size(); ++i) {
            const auto& a = d.graph.arrows[i];
            if (done[i] || !std::all_of(a.sources.begin(), a.sources.end(), [&](const auto& v) { return ready.count(v); }))
                continue;
            done[i] = progress = true;
            order.push_back(&a);
            ready.insert(a.targets.begin(), a.targets.end());
        }
    }
    for (std::size_t i = 0; i < done.size(); ++i)
        if (!done[i]) order.push_back(&d.graph.arrows[i]);
    std::ostringstream os;
    bool first = true;
    auto put = [&](const std::string& tok) {
        os << (first ? "" : " ") << tok;
        first = false;
    };
    for (const auto* a : order) {
        for (const auto& v : a->sources) put("r(" + v + "," + d.graph.vertex(v).sign + ")");
        put(a->label);
        for (const auto& v : a->targets) put("r(" + d.graph.vertex(v).sign + "," + v + ")");
    }
    return os.str();
}

}  // namespace osk
