#include "omegasketch/relation.hpp"

#include <algorithm>
#include <set>

#include "omegasketch/errors.hpp"
#include "table.hpp"

namespace osk {

namespace {

bool contains(const std::vector<std::string>& xs, const std::string& x) {
    return std::find(xs.begin(), xs.end(), x) != xs.end();
}

void push_unique(std::vector<std::string>& xs, const std::string& x) {
    if (!contains(xs, x)) xs.push_back(x);
}

bool same_set(const OmegaSet& a, const OmegaSet& b) { return approx_equal(a, b, kEps); }

// Variable ids shared by every table built in one operation.
class Names {
public:
    int id(const std::string& n) {
        auto it = std::find(names_.begin(), names_.end(), n);
        if (it != names_.end()) return static_cast<int>(it - names_.begin());
        names_.push_back(n);
        return static_cast<int>(names_.size() - 1);
    }
    const std::string& name(int id) const { return names_[static_cast<std::size_t>(id)]; }

private:
    std::vector<std::string> names_;
};

detail::Table to_table(const MultiMorphism& f, Names& names) {
    detail::Table t;
    for (const auto& a : f.attributes()) {
        t.vars.push_back(names.id(a.name));
        t.dims.push_back(a.set.size());
    }
    t.vals = f.values();
    return t;
}

// Attribute lookup across two morphisms, erroring when a shared name is bound twice.
std::map<std::string, OmegaSet> attribute_sets(const MultiMorphism& f, const MultiMorphism& g) {
    std::map<std::string, OmegaSet> sets;
    for (const auto* m : {&f, &g})
        for (const auto& a : m->attributes()) {
            auto [it, inserted] = sets.emplace(a.name, a.set);
            if (!inserted && !same_set(it->second, a.set))
                throw ShapeError("attribute '" + a.name + "' is bound to different Omega-sets in '" + f.name() +
                                 "' and '" + g.name() + "'");
        }
    return sets;
}

void check_algebras(const MultiMorphism& f, const MultiMorphism& g) {
    if (!(f.algebra() == g.algebra()))
        throw ShapeError("'" + f.name() + "' and '" + g.name() + "' use different algebras");
}

MultiMorphism from_table(std::string name, const detail::Table& t, const Names& names,
                         const std::map<std::string, OmegaSet>& sets, const Algebra& alg,
                         std::vector<std::string> sources, std::vector<std::string> targets) {
    std::vector<Attribute> attrs;
    for (int v : t.vars) attrs.push_back({names.name(v), sets.at(names.name(v))});
    return MultiMorphism(std::move(name), alg, std::move(attrs), std::move(sources), std::move(targets), t.vals);
}

// Product Omega-set over a list of attributes, used as default alpha/beta.
OmegaSet attribute_product(const MultiMorphism& f, const std::vector<std::string>& names) {
    std::vector<OmegaSet> parts;
    for (const auto& n : names) parts.push_back(f.attribute(n).set);
    return product(parts, names);
}

// Morphism over ins ++ outs whose value at (i, j) is fn(i, j), i and j flat over each block.
MultiMorphism block(std::string name, const Algebra& alg, std::vector<Attribute> ins, std::vector<Attribute> outs,
                    const std::function<TruthValue(std::size_t, std::size_t)>& fn) {
    std::size_t nin = 1, nout = 1;
    for (const auto& a : ins) nin *= a.set.size();
    for (const auto& a : outs) nout *= a.set.size();
    std::vector<std::string> sn, tn;
    for (const auto& a : ins) sn.push_back(a.name);
    for (const auto& a : outs) tn.push_back(a.name);
    std::vector<Attribute> attrs = ins;
    attrs.insert(attrs.end(), outs.begin(), outs.end());
    std::vector<TruthValue> vals;
    vals.reserve(nin * nout);
    for (std::size_t i = 0; i < nin; ++i)
        for (std::size_t j = 0; j < nout; ++j) vals.push_back(fn(i, j));
    return MultiMorphism(std::move(name), alg, std::move(attrs), std::move(sn), std::move(tn), std::move(vals));
}

std::vector<Attribute> select(const MultiMorphism& f, const std::vector<std::string>& names, const std::string& suffix) {
    std::vector<Attribute> out;
    for (const auto& n : names) out.push_back({n + suffix, f.attribute(n).set});
    return out;
}

}  // namespace

MultiMorphism::MultiMorphism(std::string name, Algebra alg, std::vector<Attribute> attrs,
                             std::vector<std::string> sources, std::vector<std::string> targets,
                             std::vector<TruthValue> values)
    : name_(std::move(name)),
      alg_(std::move(alg)),
      attrs_(std::move(attrs)),
      sources_(std::move(sources)),
      targets_(std::move(targets)),
      values_(std::move(values)) {
    std::set<std::string> seen;
    std::size_t cells = 1;
    for (const auto& a : attrs_) {
        if (!seen.insert(a.name).second) throw ShapeError("duplicate attribute '" + a.name + "' in '" + name_ + "'");
        if (!(a.set.algebra() == alg_))
            throw ShapeError("attribute '" + a.name + "' of '" + name_ + "' uses a different algebra");
        cells *= a.set.size();
    }
    for (const auto& s : sources_) {
        if (!seen.count(s)) throw ShapeError("source '" + s + "' is not an attribute of '" + name_ + "'");
        if (contains(targets_, s)) throw ShapeError("'" + s + "' is both source and target of '" + name_ + "'");
    }
    for (const auto& t : targets_)
        if (!seen.count(t)) throw ShapeError("target '" + t + "' is not an attribute of '" + name_ + "'");
    if (values_.size() != cells)
        throw ShapeError("'" + name_ + "' holds " + std::to_string(values_.size()) + " values for " +
                         std::to_string(cells) + " cells");
    for (const auto& v : values_) alg_.require(v);
}

MultiMorphism MultiMorphism::constant(std::string name, std::vector<Attribute> attrs, std::vector<std::string> sources,
                                      std::vector<std::string> targets, const TruthValue& v, const Algebra& alg) {
    std::size_t cells = 1;
    for (const auto& a : attrs) cells *= a.set.size();
    return MultiMorphism(std::move(name), alg, std::move(attrs), std::move(sources), std::move(targets),
                         std::vector<TruthValue>(cells, v));
}

MultiMorphism MultiMorphism::tabulate(std::string name, std::vector<Attribute> attrs, std::vector<std::string> sources,
                                      std::vector<std::string> targets, const Algebra& alg,
                                      const std::function<TruthValue(std::span<const std::size_t>)>& fn) {
    MultiMorphism m = constant(std::move(name), std::move(attrs), std::move(sources), std::move(targets), alg.bottom(), alg);
    for (std::size_t i = 0; i < m.values_.size(); ++i) {
        auto idx = m.unflatten(i);
        m.values_[i] = fn(idx);
        alg.require(m.values_[i]);
    }
    return m;
}

std::vector<std::size_t> MultiMorphism::shape() const {
    std::vector<std::size_t> s;
    for (const auto& a : attrs_) s.push_back(a.set.size());
    return s;
}

const TruthValue& MultiMorphism::at(std::initializer_list<std::size_t> idx) const {
    return at(std::span<const std::size_t>(idx.begin(), idx.size()));
}

void MultiMorphism::set(std::span<const std::size_t> idx, const TruthValue& v) {
    alg_.require(v);
    values_[flat_index(idx)] = v;
}

std::size_t MultiMorphism::flat_index(std::span<const std::size_t> idx) const {
    if (idx.size() != attrs_.size()) throw ShapeError("index rank does not match '" + name_ + "'");
    std::size_t flat = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] >= attrs_[k].set.size()) throw ShapeError("index out of range in '" + name_ + "'");
        flat = flat * attrs_[k].set.size() + idx[k];
    }
    return flat;
}

std::vector<std::size_t> MultiMorphism::unflatten(std::size_t flat) const {
    std::vector<std::size_t> idx(attrs_.size());
    for (std::size_t k = attrs_.size(); k-- > 0;) {
        idx[k] = flat % attrs_[k].set.size();
        flat /= attrs_[k].set.size();
    }
    return idx;
}

std::optional<std::size_t> MultiMorphism::attribute_index(const std::string& name) const {
    for (std::size_t k = 0; k < attrs_.size(); ++k)
        if (attrs_[k].name == name) return k;
    return std::nullopt;
}

const Attribute& MultiMorphism::attribute(const std::string& name) const {
    if (auto k = attribute_index(name)) return attrs_[*k];
    throw ReferenceError("'" + name + "' is not an attribute of '" + name_ + "'");
}

std::vector<std::string> MultiMorphism::attribute_names() const {
    std::vector<std::string> n;
    for (const auto& a : attrs_) n.push_back(a.name);
    return n;
}

MultiMorphism MultiMorphism::renamed(std::string name) const {
    MultiMorphism m = *this;
    m.name_ = std::move(name);
    return m;
}

MultiMorphism MultiMorphism::with_designation(std::vector<std::string> sources, std::vector<std::string> targets) const {
    return MultiMorphism(name_, alg_, attrs_, std::move(sources), std::move(targets), values_);
}

MultiMorphism MultiMorphism::rename_attributes(const std::map<std::string, std::string>& mapping) const {
    auto rn = [&](const std::string& n) {
        auto it = mapping.find(n);
        return it == mapping.end() ? n : it->second;
    };
    std::vector<Attribute> attrs = attrs_;
    for (auto& a : attrs) a.name = rn(a.name);
    std::vector<std::string> s, t;
    for (const auto& x : sources_) s.push_back(rn(x));
    for (const auto& x : targets_) t.push_back(rn(x));
    return MultiMorphism(name_, alg_, std::move(attrs), std::move(s), std::move(t), values_);
}

MultiMorphism MultiMorphism::permuted(const std::vector<std::string>& order) const {
    if (order.size() != attrs_.size()) throw ShapeError("permutation of '" + name_ + "' has wrong length");
    Names names;
    auto t = to_table(*this, names);
    std::vector<int> ids;
    std::vector<Attribute> attrs;
    for (const auto& n : order) {
        attrs.push_back(attribute(n));
        ids.push_back(names.id(n));
    }
    auto r = detail::reorder(t, ids);
    return MultiMorphism(name_, alg_, std::move(attrs), sources_, targets_, std::move(r.vals));
}

MultiMorphism MultiMorphism::mapped(const Algebra& alg, const std::function<TruthValue(const TruthValue&)>& fn) const {
    std::vector<Attribute> attrs;
    for (const auto& a : attrs_) attrs.push_back({a.name, a.set.mapped(alg, fn)});
    std::vector<TruthValue> vals;
    vals.reserve(values_.size());
    for (const auto& v : values_) vals.push_back(fn(v));
    return MultiMorphism(name_, alg, std::move(attrs), sources_, targets_, std::move(vals));
}

std::string MultiMorphism::tuple_label(std::size_t flat) const {
    auto idx = unflatten(flat);
    std::string s = "(";
    for (std::size_t k = 0; k < idx.size(); ++k) s += (k ? ", " : "") + attrs_[k].set.label(idx[k]);
    return s + ")";
}

SetMap SetMap::from_labels(const OmegaSet& from, const OmegaSet& to,
                           const std::vector<std::pair<std::string, std::string>>& pairs) {
    std::vector<std::optional<std::size_t>> img(from.size());
    for (const auto& [a, b] : pairs) {
        auto i = from.index_of(a);
        auto j = to.index_of(b);
        if (img[i] && *img[i] != j) throw ShapeError("set-map sends '" + a + "' to two elements");
        img[i] = j;
    }
    SetMap m;
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (!img[i]) throw ShapeError("set-map is not defined on '" + from.label(i) + "'");
        m.map.push_back(*img[i]);
    }
    return m;
}

MultiMorphism SetMap::chi(const OmegaSet& from, const OmegaSet& to, std::string in, std::string out) const {
    if (map.size() != from.size()) throw ShapeError("set-map domain does not match '" + from.name() + "'");
    const Algebra& alg = from.algebra();
    return block("chi", alg, {{std::move(in), from}}, {{std::move(out), to}},
                 [&](std::size_t i, std::size_t j) { return map[i] == j ? alg.top() : alg.bottom(); });
}

MultiMorphism identity(const OmegaSet& a, std::string in, std::string out) {
    const Algebra& alg = a.algebra();
    return block("1_" + a.name(), alg, {{std::move(in), a}}, {{std::move(out), a}},
                 [&](std::size_t i, std::size_t j) { return i == j ? alg.top() : alg.bottom(); });
}

MultiMorphism similarity_morphism(const OmegaSet& a, std::string in, std::string out) {
    return block("[=]_" + a.name(), a.algebra(), {{std::move(in), a}}, {{std::move(out), a}},
                 [&](std::size_t i, std::size_t j) { return a.sim(i, j); });
}

MultiMorphism similarity_morphism(std::span<const Attribute> attrs, std::vector<std::string> ins,
                                  std::vector<std::string> outs) {
    if (ins.size() != attrs.size() || outs.size() != attrs.size())
        throw ShapeError("similarity morphism needs one input and one output name per attribute");
    if (attrs.empty()) throw ShapeError("similarity morphism needs at least one attribute");
    std::vector<OmegaSet> parts;
    for (const auto& a : attrs) parts.push_back(a.set);
    const Algebra& alg = attrs[0].set.algebra();
    std::vector<Attribute> in_attrs, out_attrs;
    for (std::size_t k = 0; k < attrs.size(); ++k) {
        in_attrs.push_back({ins[k], attrs[k].set});
        out_attrs.push_back({outs[k], attrs[k].set});
    }
    OmegaSet p = product(parts, ins);
    return block("[=]", alg, std::move(in_attrs), std::move(out_attrs),
                 [&](std::size_t i, std::size_t j) { return p.sim(i, j); });
}

MultiMorphism pointwise(const MultiMorphism& f, const MultiMorphism& g, Connective c, std::size_t max_cells) {
    check_algebras(f, g);
    auto sets = attribute_sets(f, g);
    Names names;
    auto tf = to_table(f, names);
    auto tg = to_table(g, names);
    auto t = detail::combine(tf, tg, f.algebra(), c, max_cells);
    std::vector<std::string> s, tg_names;
    for (const auto* m : {&f, &g})
        for (const auto& x : m->sources()) push_unique(s, x);
    for (const auto* m : {&f, &g})
        for (const auto& x : m->targets())
            if (!contains(s, x)) push_unique(tg_names, x);
    return from_table(f.name() + std::string(" ") + to_string(c) + " " + g.name(), t, names, sets, f.algebra(),
                      std::move(s), std::move(tg_names));
}

MultiMorphism marginalize(const MultiMorphism& f, std::span<const std::string> drop) {
    Names names;
    auto t = to_table(f, names);
    for (const auto& n : drop) {
        f.attribute(n);
        t = detail::eliminate(t, names.id(n), f.algebra());
    }
    std::map<std::string, OmegaSet> sets;
    for (const auto& a : f.attributes()) sets.emplace(a.name, a.set);
    auto keep = [&](const std::vector<std::string>& xs) {
        std::vector<std::string> out;
        for (const auto& x : xs)
            if (std::find(drop.begin(), drop.end(), x) == drop.end()) out.push_back(x);
        return out;
    };
    return from_table(f.name(), t, names, sets, f.algebra(), keep(f.sources()), keep(f.targets()));
}

MultiMorphism extents(std::span<const Attribute> attrs, const Algebra& alg) {
    std::vector<Attribute> as(attrs.begin(), attrs.end());
    return MultiMorphism::tabulate("[x]", as, {}, {}, alg, [&](std::span<const std::size_t> idx) {
        TruthValue v = alg.top();
        for (std::size_t k = 0; k < idx.size(); ++k) v = alg.tensor(v, as[k].set.extent(idx[k]));
        return v;
    });
}

MultiMorphism compose(const MultiMorphism& f, const MultiMorphism& g, std::size_t max_cells) {
    std::vector<std::string> join;
    for (const auto& t : f.targets())
        if (contains(g.sources(), t)) join.push_back(t);
    auto prod = pointwise(f, g, Connective::tensor, max_cells);
    auto out = marginalize(prod, join);
    std::vector<std::string> s, t;
    for (const auto& x : f.sources()) push_unique(s, x);
    for (const auto& x : g.sources())
        if (!contains(f.targets(), x)) push_unique(s, x);
    for (const auto& x : f.targets())
        if (!contains(g.sources(), x) && !contains(s, x)) push_unique(t, x);
    for (const auto& x : g.targets())
        if (!contains(s, x)) push_unique(t, x);
    return out.with_designation(std::move(s), std::move(t)).renamed(f.name() + "*" + g.name());
}

MultiMorphism transpose(const MultiMorphism& f) {
    return f.with_designation(f.targets(), f.sources()).renamed(f.name() + "°");
}

namespace {

bool extent_match(const MultiMorphism& f, const std::vector<std::string>& side, const std::optional<OmegaSet>& ref,
                  double eps, const char* what) {
    if (side.empty()) throw ShapeError("'" + f.name() + "' has no " + std::string(what) + " attributes");
    std::vector<std::string> drop;
    for (const auto& a : f.attributes())
        if (!contains(side, a.name)) drop.push_back(a.name);
    auto m = marginalize(f, drop).permuted(side);
    OmegaSet w = ref ? *ref : attribute_product(f, side);
    if (w.size() != m.cell_count())
        throw ShapeError("reference Omega-set '" + w.name() + "' does not match the " + what + " of '" + f.name() + "'");
    for (std::size_t i = 0; i < w.size(); ++i)
        if (!f.algebra().approx_equal(m.value(i), w.extent(i), eps)) return false;
    return true;
}

MultiMorphism reference_block(const MultiMorphism& f, const std::vector<std::string>& side,
                              const std::optional<OmegaSet>& ref, const std::string& out_suffix, bool crisp) {
    OmegaSet w = ref ? *ref : attribute_product(f, side);
    std::size_t n = 1;
    for (const auto& s : side) n *= f.attribute(s).set.size();
    if (w.size() != n) throw ShapeError("reference Omega-set '" + w.name() + "' does not match '" + f.name() + "'");
    const Algebra& alg = f.algebra();
    return block("ref", alg, select(f, side, ""), select(f, side, out_suffix), [&](std::size_t i, std::size_t j) {
        if (crisp) return i == j ? alg.top() : alg.bottom();
        return w.sim(i, j);
    });
}

std::map<std::string, std::string> suffix_map(const std::vector<std::string>& names, const std::string& suffix) {
    std::map<std::string, std::string> m;
    for (const auto& n : names) m[n] = n + suffix;
    return m;
}

}  // namespace

bool is_total(const MultiMorphism& f, const std::optional<OmegaSet>& alpha, double eps) {
    return extent_match(f, f.sources(), alpha, eps, "source");
}

bool is_faithful(const MultiMorphism& f, const std::optional<OmegaSet>& beta, double eps) {
    return extent_match(f, f.targets(), beta, eps, "target");
}

Classification classify(const MultiMorphism& f, const std::optional<OmegaSet>& alpha,
                        const std::optional<OmegaSet>& beta, double eps) {
    const auto& S = f.sources();
    const auto& T = f.targets();
    if (S.empty() || T.empty()) throw ShapeError("classification needs source and target attributes");
    if (S.size() + T.size() != f.rank())
        throw ShapeError("classification needs every attribute of '" + f.name() + "' designated");
    const std::string p = "'";
    auto S_p = suffix_map(S, p);
    auto T_p = suffix_map(T, p);
    std::map<std::string, std::string> both = S_p;
    both.insert(T_p.begin(), T_p.end());

    auto alpha_m = reference_block(f, S, alpha, p, false);
    auto beta_m = reference_block(f, T, beta, p, false);
    auto f_pp = f.rename_attributes(both);

    Classification c;
    // f° ⊗ α ⊗ f = β
    auto epi_lhs = compose(compose(transpose(f), alpha_m), f_pp);
    c.epi = approx_equal(epi_lhs, beta_m, eps);
    // α = f ⊗ β ⊗ f°
    auto mono_rhs = compose(compose(f, beta_m), transpose(f_pp));
    c.mono = approx_equal(mono_rhs, alpha_m, eps);
    c.iso = c.epi && c.mono;
    auto id_a = reference_block(f, S, std::nullopt, p, true);
    auto id_b = reference_block(f, T, std::nullopt, p, true);
    auto ffo = compose(f, transpose(f.rename_attributes(S_p)));
    auto fof = compose(transpose(f), f.rename_attributes(T_p));
    c.orthogonal = approx_equal(ffo, id_a, eps) && approx_equal(fof, id_b, eps);
    return c;
}

MultiMorphism indexed_join(const MultiMorphism& d0, std::span<const MultiMorphism> ds,
                           const std::vector<std::vector<std::string>>& keys, std::size_t max_cells) {
    if (keys.size() != ds.size()) throw ShapeError("indexed join needs one key list per joined relation");
    MultiMorphism acc = d0;
    for (std::size_t k = 0; k < ds.size(); ++k) {
        for (const auto& key : keys[k]) {
            if (!acc.attribute_index(key))
                throw ReferenceError("key '" + key + "' is missing from '" + acc.name() + "'");
            if (!ds[k].attribute_index(key))
                throw ReferenceError("key '" + key + "' is missing from '" + ds[k].name() + "'");
        }
        acc = pointwise(acc, ds[k], Connective::tensor, max_cells);
        std::vector<std::string> done;
        for (const auto& key : keys[k]) {
            bool later = false;
            for (std::size_t j = k + 1; j < ds.size(); ++j)
                later = later || contains(keys[j], key);
            if (!later) done.push_back(key);
        }
        acc = marginalize(acc, done);
    }
    return acc;
}

std::optional<std::string> first_difference(const MultiMorphism& f, const MultiMorphism& g, double eps) {
    auto fn = f.attribute_names();
    auto gn = g.attribute_names();
    if (std::set<std::string>(fn.begin(), fn.end()) != std::set<std::string>(gn.begin(), gn.end()))
        return "attribute sets differ: {" + join_labels(fn) + "} vs {" + join_labels(gn) + "}";
    for (const auto& a : f.attributes())
        if (a.set.support() != g.attribute(a.name).set.support())
            return "attribute '" + a.name + "' has different supports";
    auto gp = g.permuted(fn);
    for (std::size_t i = 0; i < f.cell_count(); ++i)
        if (!f.algebra().approx_equal(f.value(i), gp.value(i), eps))
            return f.tuple_label(i) + ": " + f.algebra().format(f.value(i)) + " vs " + g.algebra().format(gp.value(i));
    return std::nullopt;
}

bool approx_equal(const MultiMorphism& f, const MultiMorphism& g, double eps) {
    if (!(f.algebra() == g.algebra())) return false;
    return !first_difference(f, g, eps).has_value();
}

IndependenceResult independent(const MultiMorphism& f, const MultiMorphism& g, double eps) {
    auto fg = compose(f, g);
    auto gf = compose(g, f);
    auto diff = first_difference(fg, gf, eps);
    return {!diff.has_value(), diff.value_or("")};
}

}  // namespace osk
