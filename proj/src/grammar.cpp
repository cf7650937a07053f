#include "omegasketch/grammar.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#include "omegasketch/errors.hpp"

namespace osk {

Word parse_word(const std::string& text) {
    std::istringstream in(text);
    Word w;
    for (std::string s; in >> s;) w.push_back(s);
    return w;
}

std::string format_word(const Word& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + w[i];
    return s;
}

Ontology::Ontology(std::vector<std::string> inputs, const std::vector<std::pair<std::string, std::string>>& order) {
    for (auto& s : inputs) add(is_output(s) ? dual(s) : s);
    std::vector<std::pair<std::string, std::string>> base;
    for (auto [a, b] : order) {
        if (is_output(a) != is_output(b)) throw ShapeError("order pair '" + a + " <= " + b + "' mixes polarities");
        if (is_output(a)) {
            a = dual(a);
            b = dual(b);
        }
        add(a);
        add(b);
        base.emplace_back(a, b);
    }
    for (const auto& s : inputs_) leq_.emplace(s, s);
    leq_.insert(base.begin(), base.end());
    // transitive closure, Floyd-Warshall style over the finite sign set
    for (const auto& k : inputs_)
        for (const auto& i : inputs_)
            if (leq_.count({i, k}))
                for (const auto& j : inputs_)
                    if (leq_.count({k, j})) leq_.emplace(i, j);
    for (const auto& [a, b] : leq_)
        if (a != b && leq_.count({b, a}))
            throw ShapeError("ontology order is not antisymmetric: '" + a + "' and '" + b + "'");
}

void Ontology::add(const std::string& s) {
    if (s.empty() || is_output(s)) throw ShapeError("input sign expected, got '" + s + "'");
    if (std::find(inputs_.begin(), inputs_.end(), s) == inputs_.end()) {
        inputs_.push_back(s);
        leq_.emplace(s, s);
    }
}

bool Ontology::contains(const std::string& s) const {
    const std::string base = is_output(s) ? dual(s) : s;
    return std::find(inputs_.begin(), inputs_.end(), base) != inputs_.end();
}

std::string Ontology::dual(const std::string& s) { return is_output(s) ? s.substr(0, s.size() - 1) : s + "+"; }

bool Ontology::leq(const std::string& a, const std::string& b) const {
    if (is_output(a) != is_output(b)) return false;
    if (is_output(a)) return leq_.count({dual(a), dual(b)}) > 0;
    return leq_.count({a, b}) > 0;
}

void Ontology::require(const Word& w) const {
    for (const auto& s : w)
        if (!contains(s)) throw ReferenceError("unknown sign '" + s + "'");
}

std::vector<std::pair<std::string, std::string>> Ontology::order_pairs() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& p : leq_)
        if (p.first != p.second) out.push_back(p);
    return out;
}

WordIO word_io(const Word& w) {
    WordIO io;
    for (const auto& s : w) (Ontology::is_output(s) ? io.outputs : io.inputs).push_back(s);
    return io;
}

GlueTrace glue_trace(const Word& w, const Word& w2, const Ontology& ont) {
    std::vector<std::size_t> left(w.size()), right(w2.size());
    std::iota(left.begin(), left.end(), 0);
    std::iota(right.begin(), right.end(), 0);
    GlueTrace tr;
    while (true) {
        bool found = false;
        for (std::size_t li = 0; li < left.size() && !found; ++li) {
            const auto& lambda = w[left[li]];
            if (!Ontology::is_output(lambda)) continue;
            const std::string want = Ontology::dual(lambda);
            std::optional<std::size_t> hit;
            for (std::size_t ri = 0; ri < right.size() && !hit; ++ri)
                if (w2[right[ri]] == want) hit = ri;
            for (std::size_t ri = 0; ri < right.size() && !hit; ++ri)
                if (w2[right[ri]] != want && ont.leq(want, w2[right[ri]])) hit = ri;
            if (!hit) continue;
            tr.pairs.emplace_back(left[li], right[*hit]);
            left.erase(left.begin() + static_cast<std::ptrdiff_t>(li));
            right.erase(right.begin() + static_cast<std::ptrdiff_t>(*hit));
            found = true;
        }
        if (!found) break;
    }
    tr.left_residue = std::move(left);
    tr.right_residue = std::move(right);
    return tr;
}

Word glue_words(const Word& w, const Word& w2, const Ontology& ont) {
    auto tr = glue_trace(w, w2, ont);
    Word out;
    for (auto i : tr.left_residue) out.push_back(w[i]);
    for (auto i : tr.right_residue) out.push_back(w2[i]);
    return out;
}

const Word& Library::word(const std::string& label) const {
    auto it = components.find(label);
    if (it == components.end()) throw ReferenceError("unknown component '" + label + "'");
    return it->second;
}

namespace {

// Reflexive-symmetric-transitive closure of declared pairs.
template <class T>
bool equivalent(const std::vector<std::pair<T, T>>& pairs, const T& a, const T& b) {
    if (a == b) return true;
    std::vector<T> seen{a}, frontier{a};
    while (!frontier.empty()) {
        T x = frontier.back();
        frontier.pop_back();
        for (const auto& [p, q] : pairs)
            for (const auto& [from, to] : {std::pair{p, q}, std::pair{q, p}})
                if (from == x && std::find(seen.begin(), seen.end(), to) == seen.end()) {
                    if (to == b) return true;
                    seen.push_back(to);
                    frontier.push_back(to);
                }
    }
    return false;
}

}  // namespace

bool Library::labels_equivalent(const std::string& a, const std::string& b) const {
    return equivalent(equiv_labels, a, b);
}

bool Library::words_equivalent(const Word& a, const Word& b) const { return equivalent(equiv_words, a, b); }

std::vector<std::string> Library::problems() const {
    std::vector<std::string> out;
    for (const auto& [label, w] : components)
        for (const auto& s : w)
            if (!ontology.contains(s)) out.push_back("component '" + label + "' uses unknown sign '" + s + "'");
    for (const auto& [a, b] : equiv_labels) {
        if (!has(a) || !has(b)) {
            out.push_back("equivalence references unknown component '" + (has(a) ? b : a) + "'");
            continue;
        }
        if (!words_equivalent(word(a), word(b)))
            out.push_back("equivalent components '" + a + "' and '" + b + "' have inequivalent words");
    }
    return out;
}

MultiGraph parser_graph(const Library& lib) {
    MultiGraph g;
    auto add_vertex = [&](const std::string& s) {
        if (!g.vertex_index(s)) g.vertices.push_back({s, s});
    };
    for (const auto& [label, w] : lib.components) {
        lib.ontology.require(w);
        auto io = word_io(w);
        Arrow a{label, label, io.inputs, {}};
        for (const auto& o : io.outputs) a.targets.push_back(Ontology::dual(o));
        for (const auto& s : a.sources) add_vertex(s);
        for (const auto& s : a.targets) add_vertex(s);
        g.arrows.push_back(std::move(a));
    }
    return g;
}

Word Boundary::word() const {
    Word w = inputs;
    w.insert(w.end(), outputs.begin(), outputs.end());
    return w;
}

Boundary boundary(const Configuration& d) {
    Boundary b;
    for (const auto& v : d.graph.vertices) {
        if (!d.graph.has_incoming(v.id)) {
            b.input_vertices.push_back(v.id);
            b.inputs.push_back(v.sign);
        }
        if (!d.graph.has_outgoing(v.id)) {
            b.output_vertices.push_back(v.id);
            b.outputs.push_back(Ontology::dual(v.sign));
        }
    }
    return b;
}

ConfigurationReport validate_configuration(const Configuration& d, const Library& lib) {
    ConfigurationReport r;
    auto fail = [&](std::string msg) {
        r.valid = false;
        r.violations.push_back(std::move(msg));
    };
    try {
        d.graph.validate();
    } catch (const Error& e) {
        fail(e.what());
        return r;
    }
    for (const auto& v : d.graph.vertices) {
        if (!lib.ontology.contains(v.sign)) fail("vertex '" + v.id + "' has unknown sign '" + v.sign + "'");
        else if (Ontology::is_output(v.sign)) fail("vertex '" + v.id + "' carries output sign '" + v.sign + "'");
    }
    for (const auto& a : d.graph.arrows) {
        if (!lib.has(a.label)) {
            fail("arrow '" + a.id + "': unknown component '" + a.label + "'");
            continue;
        }
        auto io = word_io(lib.word(a.label));
        if (io.inputs.size() != a.sources.size() || io.outputs.size() != a.targets.size()) {
            fail("arrow '" + a.id + "': component '" + a.label + "' needs " + std::to_string(io.inputs.size()) +
                 " inputs and " + std::to_string(io.outputs.size()) + " outputs, got " +
                 std::to_string(a.sources.size()) + " and " + std::to_string(a.targets.size()));
            continue;
        }
        for (std::size_t k = 0; k < a.sources.size(); ++k) {
            const auto& sign = d.graph.vertex(a.sources[k]).sign;
            if (!lib.ontology.leq(sign, io.inputs[k]))
                fail("arrow '" + a.id + "': input " + std::to_string(k) + " needs '" + io.inputs[k] + "', vertex '" +
                     a.sources[k] + "' has '" + sign + "'");
        }
        for (std::size_t k = 0; k < a.targets.size(); ++k) {
            const auto& sign = d.graph.vertex(a.targets[k]).sign;
            const auto req = Ontology::dual(io.outputs[k]);
            if (!lib.ontology.leq(req, sign))
                fail("arrow '" + a.id + "': output " + std::to_string(k) + " provides '" + req + "', vertex '" +
                     a.targets[k] + "' has '" + sign + "'");
        }
    }
    auto b = boundary(d);
    r.inputs = b.inputs;
    r.outputs = b.outputs;
    return r;
}

namespace {

std::string fresh(const std::string& base, const std::function<bool(const std::string&)>& taken) {
    std::string id = base;
    for (int i = 1; taken(id); ++i) id = base + "'" + (i > 1 ? std::to_string(i) : "");
    return id;
}

}  // namespace

Configuration glue_diagrams(const Configuration& d, const Configuration& d2, const Ontology& ont) {
    auto b1 = boundary(d);
    auto b2 = boundary(d2);
    const Word w1 = b1.word();
    const Word w2 = b2.word();
    auto tr = glue_trace(w1, w2, ont);

    Configuration out = d;
    out.name = d.name.empty() || d2.name.empty() ? d.name + d2.name : d.name + "*" + d2.name;
    std::map<std::string, std::string> vmap;
    for (const auto& [i, j] : tr.pairs) {
        // left positions beyond the inputs index output vertices; right positions index inputs
        const auto& left_vertex = b1.output_vertices[i - b1.inputs.size()];
        vmap[b2.input_vertices[j]] = left_vertex;
    }
    auto vertex_taken = [&](const std::string& id) { return out.graph.vertex_index(id).has_value(); };
    for (const auto& v : d2.graph.vertices) {
        if (vmap.count(v.id)) continue;
        auto id = fresh(v.id, vertex_taken);
        vmap[v.id] = id;
        out.graph.vertices.push_back({id, v.sign});
    }
    auto arrow_taken = [&](const std::string& id) {
        return std::any_of(out.graph.arrows.begin(), out.graph.arrows.end(), [&](const Arrow& a) { return a.id == id; });
    };
    for (const auto& a : d2.graph.arrows) {
        Arrow n{fresh(a.id, arrow_taken), a.label, {}, {}};
        for (const auto& s : a.sources) n.sources.push_back(vmap.at(s));
        for (const auto& t : a.targets) n.targets.push_back(vmap.at(t));
        out.graph.arrows.push_back(std::move(n));
    }
    auto add_unique = [](std::vector<std::string>& xs, const std::string& x) {
        if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
    };
    for (const auto& s : d2.sources) add_unique(out.sources, vmap.at(s));
    for (const auto& t : d2.targets) add_unique(out.targets, vmap.at(t));
    std::erase_if(out.targets, [&](const std::string& t) {
        return std::find(out.sources.begin(), out.sources.end(), t) != out.sources.end();
    });
    return out;
}

Configuration apply_refinement(const RefinementRules& rules, const Configuration& d, const Library& lib) {
    Configuration out{d.name, {d.graph.vertices, {}}, d.sources, d.targets};
    auto vertex_taken = [&](const std::string& id) { return out.graph.vertex_index(id).has_value(); };
    auto arrow_taken = [&](const std::string& id) {
        return std::any_of(out.graph.arrows.begin(), out.graph.arrows.end(), [&](const Arrow& a) { return a.id == id; });
    };
    std::vector<const Arrow*> pending;
    for (const auto& a : d.graph.arrows) {
        if (!rules.count(a.label)) out.graph.arrows.push_back(a);
        else pending.push_back(&a);
    }
    for (const Arrow* a : pending) {
        const auto& rule = rules.at(a->label);
        auto rb = boundary(rule);
        auto io = word_io(lib.word(a->label));
        Word want_out;
        for (const auto& o : io.outputs) want_out.push_back(o);
        if (rb.inputs != io.inputs || rb.outputs != want_out)
            throw PreconditionError("rule for '" + a->label + "' has boundary '" + format_word(rb.word()) +
                                    "' but the component word is '" + format_word(lib.word(a->label)) + "'");
        std::map<std::string, std::string> vmap;
        for (std::size_t k = 0; k < rb.input_vertices.size(); ++k) vmap[rb.input_vertices[k]] = a->sources[k];
        for (std::size_t k = 0; k < rb.output_vertices.size(); ++k) {
            const auto& rv = rb.output_vertices[k];
            if (vmap.count(rv) && vmap[rv] != a->targets[k])
                throw PreconditionError("rule for '" + a->label + "' passes an input straight to an output");
            vmap[rv] = a->targets[k];
        }
        for (const auto& v : rule.graph.vertices) {
            if (vmap.count(v.id)) continue;
            auto id = fresh(a->id + "." + v.id, vertex_taken);
            vmap[v.id] = id;
            out.graph.vertices.push_back({id, v.sign});
        }
        for (const auto& ra : rule.graph.arrows) {
            Arrow n{fresh(a->id + "." + ra.id, arrow_taken), ra.label, {}, {}};
            for (const auto& s : ra.sources) n.sources.push_back(vmap.at(s));
            for (const auto& t : ra.targets) n.targets.push_back(vmap.at(t));
            out.graph.arrows.push_back(std::move(n));
        }
    }
    return out;
}

Configuration normal_form(const RefinementRules& rules, const Configuration& d, const Library& lib,
                          std::size_t max_steps) {
    Configuration cur = d;
    for (std::size_t step = 0; step <= max_steps; ++step) {
        bool open = std::any_of(cur.graph.arrows.begin(), cur.graph.arrows.end(),
                                [&](const Arrow& a) { return rules.count(a.label) > 0; });
        if (!open) return cur;
        cur = apply_refinement(rules, cur, lib);
    }
    throw PreconditionError("refinement did not reach a normal form within " + std::to_string(max_steps) + " steps");
}

}  // namespace osk
