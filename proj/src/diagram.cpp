#include "omegasketch/diagram.hpp"

#include <algorithm>
#include <set>

#include "omegasketch/errors.hpp"
#include "table.hpp"

namespace osk {

void MultiGraph::validate() const {
    std::set<std::string> vs, as;
    for (const auto& v : vertices)
        if (!vs.insert(v.id).second) throw ShapeError("duplicate vertex id '" + v.id + "'");
    for (const auto& a : arrows) {
        if (!as.insert(a.id).second) throw ShapeError("duplicate arrow id '" + a.id + "'");
        for (const auto* side : {&a.sources, &a.targets})
            for (const auto& e : *side)
                if (!vs.count(e)) throw ReferenceError("arrow '" + a.id + "' references unknown vertex '" + e + "'");
    }
}

const Vertex& MultiGraph::vertex(const std::string& id) const {
    for (const auto& v : vertices)
        if (v.id == id) return v;
    throw ReferenceError("unknown vertex '" + id + "'");
}

const Arrow& MultiGraph::arrow(const std::string& id) const {
    for (const auto& a : arrows)
        if (a.id == id) return a;
    throw ReferenceError("unknown arrow '" + id + "'");
}

std::optional<std::size_t> MultiGraph::vertex_index(const std::string& id) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i].id == id) return i;
    return std::nullopt;
}

bool MultiGraph::has_incoming(const std::string& vid) const {
    return std::any_of(arrows.begin(), arrows.end(), [&](const Arrow& a) {
        return std::find(a.targets.begin(), a.targets.end(), vid) != a.targets.end();
    });
}

bool MultiGraph::has_outgoing(const std::string& vid) const {
    return std::any_of(arrows.begin(), arrows.end(), [&](const Arrow& a) {
        return std::find(a.sources.begin(), a.sources.end(), vid) != a.sources.end();
    });
}

const OmegaSet& MultiDiagram::set_of(const std::string& vid) const {
    auto it = vertex_sets.find(vid);
    if (it == vertex_sets.end()) throw ReferenceError("vertex '" + vid + "' has no Omega-set assigned");
    return it->second;
}

const MultiMorphism& MultiDiagram::map_of(const std::string& aid) const {
    auto it = arrow_maps.find(aid);
    if (it == arrow_maps.end()) throw ReferenceError("arrow '" + aid + "' has no multi-morphism assigned");
    return it->second;
}

const Algebra& MultiDiagram::algebra() const {
    if (graph.vertices.empty()) throw ShapeError("diagram has no vertices");
    return set_of(graph.vertices.front().id).algebra();
}

void MultiDiagram::validate() const {
    graph.validate();
    const Algebra& alg = algebra();
    for (const auto& v : graph.vertices)
        if (!(set_of(v.id).algebra() == alg)) throw ShapeError("vertex '" + v.id + "' uses a different algebra");
    for (const auto& a : graph.arrows) {
        const auto& m = map_of(a.id);
        if (!(m.algebra() == alg)) throw ShapeError("arrow '" + a.id + "' uses a different algebra");
        if (m.sources().size() != a.sources.size() || m.targets().size() != a.targets.size() ||
            m.sources().size() + m.targets().size() != m.rank())
            throw ShapeError("arrow '" + a.id + "' has " + std::to_string(a.sources.size()) + "+" +
                             std::to_string(a.targets.size()) + " tentacles but '" + m.name() + "' has " +
                             std::to_string(m.sources().size()) + "+" + std::to_string(m.targets().size()) +
                             " designated attributes over rank " + std::to_string(m.rank()));
        auto check = [&](const std::string& vid, const std::string& attr) {
            if (set_of(vid).support() != m.attribute(attr).set.support())
                throw ShapeError("arrow '" + a.id + "': attribute '" + attr + "' does not range over the support of vertex '" +
                                 vid + "'");
        };
        for (std::size_t k = 0; k < a.sources.size(); ++k) check(a.sources[k], m.sources()[k]);
        for (std::size_t k = 0; k < a.targets.size(); ++k) check(a.targets[k], m.targets()[k]);
    }
    for (const auto& s : sources) {
        graph.vertex(s);
        if (std::find(targets.begin(), targets.end(), s) != targets.end())
            throw ShapeError("vertex '" + s + "' is both a source and a target of the diagram");
    }
    for (const auto& t : targets) graph.vertex(t);
}

namespace {

int vid_index(const MultiDiagram& d, const std::string& id) {
    auto i = d.graph.vertex_index(id);
    if (!i) throw ReferenceError("unknown vertex '" + id + "'");
    return static_cast<int>(*i);
}

detail::Table extent_table(const MultiDiagram& d, std::size_t i) {
    const auto& w = d.set_of(d.graph.vertices[i].id);
    detail::Table t{{static_cast<int>(i)}, {w.size()}, {}};
    for (std::size_t a = 0; a < w.size(); ++a) t.vals.push_back(w.extent(a));
    return t;
}

detail::Table arrow_table(const MultiDiagram& d, const Arrow& a) {
    const auto& m = d.map_of(a.id);
    // attribute positions in tentacle order
    std::vector<std::string> order = m.sources();
    order.insert(order.end(), m.targets().begin(), m.targets().end());
    auto p = m.permuted(order);
    std::vector<int> vars;
    std::vector<std::size_t> dims;
    for (const auto* side : {&a.sources, &a.targets})
        for (const auto& v : *side) {
            vars.push_back(vid_index(d, v));
            dims.push_back(d.set_of(v).size());
        }
    return detail::bind(vars, dims, p.values());
}

MultiMorphism to_morphism(const MultiDiagram& d, const detail::Table& t, std::string name) {
    std::vector<Attribute> attrs;
    std::vector<std::string> names;
    for (int v : t.vars) {
        const auto& id = d.graph.vertices[static_cast<std::size_t>(v)].id;
        attrs.push_back({id, d.set_of(id)});
        names.push_back(id);
    }
    auto pick = [&](const std::vector<std::string>& xs) {
        std::vector<std::string> out;
        for (const auto& x : xs)
            if (std::find(names.begin(), names.end(), x) != names.end()) out.push_back(x);
        return out;
    };
    return MultiMorphism(std::move(name), d.algebra(), std::move(attrs), pick(d.sources), pick(d.targets), t.vals);
}

std::vector<int> all_vertices(const MultiDiagram& d) {
    std::vector<int> v(d.graph.vertices.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
    return v;
}

detail::Table extents_all(const MultiDiagram& d, std::size_t max_cells) {
    std::size_t cells = 1;
    for (const auto& v : d.graph.vertices) cells *= d.set_of(v.id).size();
    detail::check_cells(cells, max_cells);
    detail::Table acc = detail::constant_table(d.algebra().top());
    for (std::size_t i = 0; i < d.graph.vertices.size(); ++i)
        acc = detail::combine(acc, extent_table(d, i), d.algebra(), Connective::tensor, max_cells);
    return acc;
}

}  // namespace

MultiMorphism discrete_product(const MultiDiagram& d, const EvalOptions& opts) {
    d.validate();
    return to_morphism(d, extents_all(d, opts.max_cells), "Prod");
}

MultiMorphism limit(const MultiDiagram& d, const EvalOptions& opts) {
    d.validate();
    const auto& alg = d.algebra();
    auto acc = extents_all(d, opts.max_cells);
    for (const auto& a : d.graph.arrows)
        acc = detail::combine(acc, arrow_table(d, a), alg, Connective::tensor, opts.max_cells);
    return to_morphism(d, acc, "Lim");
}

MultiMorphism colimit(const MultiDiagram& d, const EvalOptions& opts) {
    d.validate();
    const auto& alg = d.algebra();
    auto acc = extents_all(d, opts.max_cells);
    if (!d.graph.arrows.empty()) {
        detail::Table any = detail::constant_table(alg.bottom());
        for (const auto& a : d.graph.arrows)
            any = detail::combine(any, arrow_table(d, a), alg, Connective::join, opts.max_cells);
        acc = detail::combine(acc, any, alg, Connective::tensor, opts.max_cells);
    }
    return to_morphism(d, detail::reorder(acc, all_vertices(d)), "coLim");
}

MultiMorphism projected_limit(const MultiDiagram& d, const std::vector<std::string>& keep, const EvalOptions& opts) {
    d.validate();
    std::vector<detail::Table> factors;
    for (std::size_t i = 0; i < d.graph.vertices.size(); ++i) factors.push_back(extent_table(d, i));
    for (const auto& a : d.graph.arrows) factors.push_back(arrow_table(d, a));
    std::vector<int> ids;
    for (const auto& k : keep) ids.push_back(vid_index(d, k));
    auto t = detail::eliminate_all_but(std::move(factors), ids, d.algebra(), opts.max_cells);
    return to_morphism(d, t, "Lim|" + join_labels(keep));
}

CommutativityResult commutativity(const MultiDiagram& d, const std::optional<TruthValue>& lambda,
                                  const EvalOptions& opts) {
    if (d.sources.empty()) throw PreconditionError("commutativity needs a non-empty source set");
    d.validate();
    const auto& alg = d.algebra();
    auto L = projected_limit(d, d.sources, opts);

    // ⊗ over hidden vertices of the best extent they can reach.
    TruthValue hidden = alg.top();
    for (const auto& v : d.graph.vertices) {
        if (std::find(d.sources.begin(), d.sources.end(), v.id) != d.sources.end()) continue;
        const auto& w = d.set_of(v.id);
        TruthValue best = alg.bottom();
        for (std::size_t a = 0; a < w.size(); ++a) best = alg.join(best, w.extent(a));
        hidden = alg.tensor(hidden, best);
    }
    CommutativityResult r;
    r.degree = alg.top();
    std::optional<std::size_t> witness;
    std::vector<TruthValue> cells;
    for (std::size_t i = 0; i < L.cell_count(); ++i) {
        auto idx = L.unflatten(i);
        TruthValue p = hidden;
        for (std::size_t k = 0; k < idx.size(); ++k) p = alg.tensor(p, L.attributes()[k].set.extent(idx[k]));
        TruthValue e = alg.equiv(L.value(i), p);
        cells.push_back(e);
        r.degree = alg.meet(r.degree, e);
    }
    for (std::size_t i = 0; i < cells.size() && !witness; ++i)
        if (alg.approx_equal(cells[i], r.degree) && !alg.is_top(cells[i])) witness = i;
    for (std::size_t i = 0; i < cells.size() && !witness; ++i)
        if (!alg.is_top(cells[i])) witness = i;
    r.commutative = alg.is_top(r.degree);
    if (witness) r.witness = L.tuple_label(*witness);
    if (lambda) {
        alg.require(*lambda);
        r.meets_lambda = alg.approx_leq(*lambda, r.degree);
    }
    return r;
}

namespace {

std::vector<Attribute> union_attributes(const MultiMorphism& r, const MultiMorphism& s) {
    std::vector<Attribute> out = r.attributes();
    for (const auto& a : s.attributes())
        if (!r.attribute_index(a.name)) out.push_back(a);
    return out;
}

MultiMorphism with_prefactor(const MultiMorphism& body, std::vector<Attribute> pre, std::string name) {
    auto e = extents(pre, body.algebra());
    return pointwise(e, body, Connective::tensor).renamed(std::move(name));
}

void require_same_attributes(const MultiMorphism& r, const MultiMorphism& s, const char* what) {
    auto a = r.attribute_names();
    auto b = s.attribute_names();
    if (std::set<std::string>(a.begin(), a.end()) != std::set<std::string>(b.begin(), b.end()))
        throw ShapeError(std::string(what) + " needs a parallel pair over the same attributes");
}

}  // namespace

MultiMorphism equalizer(const MultiMorphism& r, const MultiMorphism& s) {
    require_same_attributes(r, s, "equalizer");
    return with_prefactor(pointwise(r, s, Connective::tensor), r.attributes(), "Eq");
}

MultiMorphism pullback(const MultiMorphism& r, const MultiMorphism& s) {
    return with_prefactor(pointwise(r, s, Connective::tensor), union_attributes(r, s), "Pb");
}

MultiMorphism coequalizer(const MultiMorphism& r, const MultiMorphism& s) {
    require_same_attributes(r, s, "coequalizer");
    return with_prefactor(pointwise(r, s, Connective::join), r.attributes(), "coEq");
}

MultiMorphism pushout(const MultiMorphism& r, const MultiMorphism& s) {
    std::vector<Attribute> outer;
    for (const auto& a : r.attributes())
        if (!s.attribute_index(a.name)) outer.push_back(a);
    for (const auto& a : s.attributes())
        if (!r.attribute_index(a.name)) outer.push_back(a);
    auto body = pointwise(r, s, Connective::join);
    if (outer.empty()) return body.renamed("Po");
    return with_prefactor(body, outer, "Po").permuted(body.attribute_names());
}

MultiDiagram divisible_decompose(const MultiMorphism& g) {
    const auto& alg = g.algebra();
    if (!alg.divisible()) throw UnsupportedOperation("decomposition needs a divisible algebra, got " + alg.name());
    if (g.rank() == 0) throw ShapeError("decomposition needs at least one attribute");
    auto ext = extents(g.attributes(), alg);
    for (std::size_t i = 0; i < g.cell_count(); ++i)
        if (!alg.approx_leq(g.value(i), ext.value(i)))
            throw PreconditionError("value at " + g.tuple_label(i) + " exceeds the extent: " + alg.format(g.value(i)) +
                                    " > " + alg.format(ext.value(i)));
    std::vector<std::string> srcs = g.sources(), tgts = g.targets();
    for (const auto& a : g.attributes())
        if (std::find(srcs.begin(), srcs.end(), a.name) == srcs.end() &&
            std::find(tgts.begin(), tgts.end(), a.name) == tgts.end())
            srcs.push_back(a.name);
    std::vector<TruthValue> vals;
    for (std::size_t i = 0; i < g.cell_count(); ++i) vals.push_back(alg.implies(ext.value(i), g.value(i)));
    MultiMorphism f("f", alg, g.attributes(), srcs, tgts, std::move(vals));

    MultiDiagram d;
    for (const auto& a : g.attributes()) {
        d.graph.vertices.push_back({a.name, a.set.name()});
        d.vertex_sets.emplace(a.name, a.set);
    }
    d.graph.arrows.push_back({"f", "f", srcs, tgts});
    d.arrow_maps.emplace("f", std::move(f));
    d.sources = g.sources();
    d.targets = g.targets();
    return d;
}

}  // namespace osk
