#include "omegasketch/omega_set.hpp"

#include <algorithm>
#include <set>

#include "omegasketch/errors.hpp"

namespace osk {

std::string join_labels(std::span<const std::string> labels) {
    std::string s;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) s += ',';
        s += labels[i];
    }
    return s;
}

OmegaSet::OmegaSet(std::string name, std::vector<std::string> support, std::vector<TruthValue> similarity,
                   Algebra alg)
    : name_(std::move(name)), support_(std::move(support)), sim_(std::move(similarity)), alg_(std::move(alg)) {
    const std::size_t n = support_.size();
    if (n == 0) throw ShapeError("Omega-set '" + name_ + "' has an empty support");
    if (sim_.size() != n * n)
        throw ShapeError("similarity of '" + name_ + "' is not " + std::to_string(n) + "x" + std::to_string(n));
    std::set<std::string> seen;
    for (const auto& l : support_)
        if (!seen.insert(l).second) throw ShapeError("duplicate label '" + l + "' in '" + name_ + "'");
    for (const auto& v : sim_) alg_.require(v);
}

OmegaSet OmegaSet::crisp(std::vector<std::string> support, Algebra alg, std::string name) {
    const std::size_t n = support.size();
    std::vector<TruthValue> sim(n * n, alg.bottom());
    for (std::size_t i = 0; i < n; ++i) sim[i * n + i] = alg.top();
    return OmegaSet(std::move(name), std::move(support), std::move(sim), std::move(alg));
}

OmegaSet OmegaSet::from_rows(std::string name, std::vector<std::string> support,
                             const std::vector<std::vector<TruthValue>>& rows, Algebra alg) {
    const std::size_t n = support.size();
    if (rows.size() != n) throw ShapeError("similarity of '" + name + "' has wrong row count");
    std::vector<TruthValue> sim;
    sim.reserve(n * n);
    for (const auto& r : rows) {
        if (r.size() != n) throw ShapeError("similarity of '" + name + "' has a row of wrong length");
        sim.insert(sim.end(), r.begin(), r.end());
    }
    return OmegaSet(std::move(name), std::move(support), std::move(sim), std::move(alg));
}

std::optional<std::size_t> OmegaSet::find(const std::string& label) const {
    auto it = std::find(support_.begin(), support_.end(), label);
    if (it == support_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - support_.begin());
}

std::size_t OmegaSet::index_of(const std::string& label) const {
    if (auto i = find(label)) return *i;
    throw ReferenceError("'" + label + "' is not in the support of '" + name_ + "'");
}

std::vector<std::size_t> OmegaSet::decompose(std::size_t flat) const {
    std::vector<std::size_t> idx(factors_.size());
    for (std::size_t k = factors_.size(); k-- > 0;) {
        const std::size_t n = factors_[k].labels.size();
        idx[k] = flat % n;
        flat /= n;
    }
    return idx;
}

OmegaSet OmegaSet::renamed(std::string name) const {
    OmegaSet w = *this;
    w.name_ = std::move(name);
    return w;
}

bool approx_equal(const OmegaSet& a, const OmegaSet& b, double eps) {
    if (a.support() != b.support() || !(a.algebra() == b.algebra())) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (!a.algebra().approx_equal(a.sim(i, j), b.sim(i, j), eps)) return false;
    return true;
}

OmegaSetReport validate(const OmegaSet& w, bool strict) {
    OmegaSetReport rep;
    const auto& alg = w.algebra();
    const std::size_t n = w.size();
    auto note = [&](std::string s) {
        if (rep.witnesses.size() < 8) rep.witnesses.push_back(std::move(s));
    };
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (!alg.approx_equal(w.sim(a, b), w.sim(b, a))) {
                rep.symmetric = false;
                ++rep.symmetry_violations;
                note("symmetry (" + w.label(a) + "," + w.label(b) + "): " + alg.format(w.sim(a, b)) +
                     " != " + alg.format(w.sim(b, a)));
            }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) {
                auto lhs = alg.tensor(w.sim(a, b), w.sim(b, c));
                if (!alg.approx_leq(lhs, w.sim(a, c))) {
                    rep.transitive = false;
                    ++rep.transitivity_violations;
                    note("transitivity (" + w.label(a) + "," + w.label(b) + "," + w.label(c) +
                         "): " + alg.format(lhs) + " > " + alg.format(w.sim(a, c)));
                }
            }
    if (strict && !rep.ok()) throw PreconditionError("similarity of '" + w.name() + "' violates " + rep.witnesses.front());
    return rep;
}

OmegaSet product(std::span<const OmegaSet> parts, std::vector<std::string> names) {
    if (parts.empty()) throw ShapeError("product of Omega-sets needs at least one factor");
    if (parts.size() == 1 && names.empty()) return parts[0];
    const Algebra& alg = parts[0].algebra();
    for (const auto& p : parts)
        if (!(p.algebra() == alg)) throw ShapeError("Omega-set '" + p.name() + "' uses a different algebra");
    if (!names.empty() && names.size() != parts.size()) throw ShapeError("one factor name per Omega-set expected");

    std::vector<Factor> factors;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const auto& p = parts[k];
        if (!p.factors().empty() && names.empty()) {
            factors.insert(factors.end(), p.factors().begin(), p.factors().end());
        } else {
            std::string nm = names.empty() ? p.name() : names[k];
            if (nm.empty()) nm = "a" + std::to_string(k);
            factors.push_back({nm, p.support()});
        }
    }
    std::set<std::string> seen;
    for (auto& f : factors) {
        std::string base = f.name;
        for (int i = 1; !seen.insert(f.name).second; ++i) f.name = base + "#" + std::to_string(i);
    }

    std::size_t total = 1;
    for (const auto& p : parts) total *= p.size();
    std::vector<std::string> support;
    support.reserve(total);
    std::vector<std::vector<std::size_t>> coords;
    coords.reserve(total);
    std::vector<std::size_t> idx(parts.size(), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::vector<std::string> labels;
        for (std::size_t k = 0; k < parts.size(); ++k) labels.push_back(parts[k].label(idx[k]));
        support.push_back(join_labels(labels));
        coords.push_back(idx);
        for (std::size_t k = parts.size(); k-- > 0;) {
            if (++idx[k] < parts[k].size()) break;
            idx[k] = 0;
        }
    }
    std::vector<TruthValue> sim(total * total);
    for (std::size_t i = 0; i < total; ++i)
        for (std::size_t j = 0; j < total; ++j) {
            TruthValue v = alg.top();
            for (std::size_t k = 0; k < parts.size(); ++k) v = alg.tensor(v, parts[k].sim(coords[i][k], coords[j][k]));
            sim[i * total + j] = v;
        }
    std::string name;
    for (std::size_t k = 0; k < parts.size(); ++k) name += (k ? "x" : "") + parts[k].name();
    OmegaSet out(name, std::move(support), std::move(sim), alg);
    out.factors_ = std::move(factors);
    return out;
}

OmegaSet observable_projection(const OmegaSet& w, std::span<const std::string> keep) {
    const auto& factors = w.factors();
    if (factors.empty()) {
        if (keep.size() == 1 && (keep[0] == w.name() || keep[0].empty())) return w;
        throw ShapeError("'" + w.name() + "' has no attribute structure to project");
    }
    if (keep.empty()) throw ShapeError("projection needs at least one kept attribute");
    std::vector<std::size_t> kept;
    for (const auto& k : keep) {
        auto it = std::find_if(factors.begin(), factors.end(), [&](const Factor& f) { return f.name == k; });
        if (it == factors.end()) throw ShapeError("'" + k + "' is not an attribute of '" + w.name() + "'");
        kept.push_back(static_cast<std::size_t>(it - factors.begin()));
    }
    const auto& alg = w.algebra();
    std::size_t m = 1;
    for (auto k : kept) m *= factors[k].labels.size();

    auto reduce = [&](const std::vector<std::size_t>& coords) {
        std::size_t r = 0;
        for (auto k : kept) r = r * factors[k].labels.size() + coords[k];
        return r;
    };
    std::vector<std::size_t> target(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) target[i] = reduce(w.decompose(i));

    std::vector<TruthValue> sim(m * m, alg.bottom());
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j) {
            auto& cell = sim[target[i] * m + target[j]];
            cell = alg.join(cell, w.sim(i, j));
        }
    std::vector<Factor> out_factors;
    for (auto k : kept) out_factors.push_back(factors[k]);
    std::vector<std::string> support(m);
    for (std::size_t r = 0; r < m; ++r) {
        std::vector<std::string> labels(kept.size());
        std::size_t rest = r;
        for (std::size_t q = kept.size(); q-- > 0;) {
            const auto& f = out_factors[q];
            labels[q] = f.labels[rest % f.labels.size()];
            rest /= f.labels.size();
        }
        support[r] = join_labels(labels);
    }
    OmegaSet out(w.name(), std::move(support), std::move(sim), alg);
    if (out_factors.size() > 1 || out_factors.size() != factors.size()) out.factors_ = std::move(out_factors);
    else out.factors_ = factors;
    return out;
}

}  // namespace osk
