#include "omegasketch/bayes.hpp"

#include <algorithm>
#include <set>

#include "omegasketch/errors.hpp"

namespace osk {

namespace {

void require_divisible(const Algebra& alg) {
    if (!alg.divisible()) throw UnsupportedOperation("conditioning needs a divisible algebra, got " + alg.name());
}

}  // namespace

Classifier condition(const MultiMorphism& f, const Description& given, const std::optional<OmegaSet>& alpha) {
    const Algebra& alg = f.algebra();
    require_divisible(alg);
    if (f.targets().empty()) throw ShapeError("'" + f.name() + "' has no target attributes to classify");
    for (const auto& [name, label] : given) {
        if (std::find(f.sources().begin(), f.sources().end(), name) == f.sources().end())
            throw ReferenceError("'" + name + "' is not a source attribute of '" + f.name() + "'");
        f.attribute(name).set.index_of(label);
    }
    Classifier c{f, alg.bottom(), {}};
    if (!is_total(f, alpha)) c.warnings.push_back("'" + f.name() + "' is not total");
    if (!is_faithful(f)) c.warnings.push_back("'" + f.name() + "' is not faithful");

    // [a]: sup of the source extent over completions of the description
    std::vector<std::size_t> given_pos(f.sources().size(), SIZE_MAX);
    for (std::size_t k = 0; k < f.sources().size(); ++k)
        if (auto it = given.find(f.sources()[k]); it != given.end())
            given_pos[k] = f.attribute(it->first).set.index_of(it->second);
    std::vector<OmegaSet> parts;
    for (const auto& s : f.sources()) parts.push_back(f.attribute(s).set);
    OmegaSet w = alpha ? *alpha : product(parts, f.sources());
    std::size_t ncells = 1;
    for (const auto& p : parts) ncells *= p.size();
    if (w.size() != ncells) throw ShapeError("source Omega-set '" + w.name() + "' does not match '" + f.name() + "'");
    TruthValue ext = alg.bottom();
    for (std::size_t flat = 0; flat < ncells; ++flat) {
        std::size_t rest = flat;
        bool match = true;
        for (std::size_t k = parts.size(); k-- > 0;) {
            std::size_t i = rest % parts[k].size();
            rest /= parts[k].size();
            if (given_pos[k] != SIZE_MAX && given_pos[k] != i) match = false;
        }
        if (match) ext = alg.join(ext, w.extent(flat));
    }
    c.given_extent = ext;

    // row f(a, _) over the targets
    std::vector<std::size_t> pos(f.rank(), SIZE_MAX);
    for (std::size_t k = 0; k < f.rank(); ++k)
        if (auto it = given.find(f.attributes()[k].name); it != given.end())
            pos[k] = f.attributes()[k].set.index_of(it->second);
    std::vector<Attribute> tattrs;
    std::vector<std::size_t> tpos;
    for (const auto& t : f.targets()) {
        tattrs.push_back(f.attribute(t));
        tpos.push_back(*f.attribute_index(t));
    }
    auto row = MultiMorphism::constant(f.name() + "(.|a)", tattrs, {}, f.targets(), alg.bottom(), alg);
    std::vector<TruthValue> acc(row.cell_count(), alg.bottom());
    for (std::size_t i = 0; i < f.cell_count(); ++i) {
        auto idx = f.unflatten(i);
        bool match = true;
        for (std::size_t k = 0; k < idx.size(); ++k)
            if (pos[k] != SIZE_MAX && pos[k] != idx[k]) match = false;
        if (!match) continue;
        std::size_t r = 0;
        for (std::size_t q = 0; q < tpos.size(); ++q) r = r * tattrs[q].set.size() + idx[tpos[q]];
        acc[r] = alg.join(acc[r], f.value(i));
    }
    const bool empty = std::all_of(acc.begin(), acc.end(), [&](const TruthValue& v) { return alg.is_bottom(v); });
    std::vector<TruthValue> vals;
    for (const auto& v : acc) vals.push_back(empty ? alg.bottom() : alg.implies(ext, v));
    if (empty) c.warnings.push_back("conditioning row is empty; classifier set to bottom");
    c.map = MultiMorphism(row.name(), alg, tattrs, {}, f.targets(), std::move(vals));
    return c;
}

Classifier chain(const Classifier& c, const MultiMorphism& g) {
    require_divisible(g.algebra());
    bool shares = false;
    for (const auto& t : c.map.targets())
        shares = shares || std::find(g.sources().begin(), g.sources().end(), t) != g.sources().end();
    if (!shares) throw ShapeError("'" + g.name() + "' does not take the classifier's attributes as sources");
    auto m = compose(c.map, g);
    std::vector<std::string> hidden;
    for (const auto& a : m.attributes())
        if (std::find(g.targets().begin(), g.targets().end(), a.name) == g.targets().end()) hidden.push_back(a.name);
    m = marginalize(m, hidden).with_designation({}, g.targets());
    return {m.renamed(g.name() + "(.|a)"), c.given_extent, c.warnings};
}

Classifier combine_independent(const Classifier& c1, const Classifier& c2, const MultiMorphism* f,
                               const MultiMorphism* g) {
    Classifier out{c1.map, c1.given_extent, c1.warnings};
    out.warnings.insert(out.warnings.end(), c2.warnings.begin(), c2.warnings.end());
    if (f && g) {
        auto ind = independent(*f, *g);
        if (!ind.independent) out.warnings.push_back("relations are not independent: " + ind.witness);
    }
    // same attribute names meet on the diagonal, disjoint ones form the product
    out.map = pointwise(c1.map, c2.map, Connective::tensor).renamed(c1.map.name() + "&" + c2.map.name());
    out.given_extent = c1.map.algebra().tensor(c1.given_extent, c2.given_extent);
    return out;
}

}  // namespace osk
