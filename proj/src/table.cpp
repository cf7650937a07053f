#include "table.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <set>

#include "omegasketch/errors.hpp"

namespace osk::detail {

std::size_t Table::cells() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
}

std::vector<std::size_t> Table::strides() const {
    std::vector<std::size_t> s(dims.size(), 1);
    for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * dims[k];
    return s;
}

int Table::position(int var) const {
    auto it = std::find(vars.begin(), vars.end(), var);
    return it == vars.end() ? -1 : static_cast<int>(it - vars.begin());
}

Table constant_table(TruthValue v) { return Table{{}, {}, {v}}; }

void check_cells(std::size_t cells, std::size_t max_cells) {
    if (cells > max_cells)
        throw CapacityError("evaluation needs " + std::to_string(cells) + " cells, above the limit of " +
                            std::to_string(max_cells));
}

namespace {

// Walks every cell of `dims` keeping one running offset per stride vector.
template <std::size_t K, class Fn>
void odometer(const std::vector<std::size_t>& dims, const std::array<std::vector<std::size_t>, K>& strides, Fn&& fn) {
    for (auto d : dims)
        if (d == 0) return;
    std::vector<std::size_t> idx(dims.size(), 0);
    std::array<std::size_t, K> off{};
    while (true) {
        fn(off);
        std::size_t k = dims.size();
        while (k > 0) {
            --k;
            if (++idx[k] < dims[k]) {
                for (std::size_t j = 0; j < K; ++j) off[j] += strides[j][k];
                break;
            }
            for (std::size_t j = 0; j < K; ++j) off[j] -= strides[j][k] * (dims[k] - 1);
            idx[k] = 0;
            if (k == 0) return;
        }
        if (dims.empty()) return;
    }
}

}  // namespace

Table combine(const Table& a, const Table& b, const Algebra& alg, Connective c, std::size_t max_cells) {
    Table out;
    out.vars = a.vars;
    out.dims = a.dims;
    for (std::size_t k = 0; k < b.vars.size(); ++k) {
        int p = a.position(b.vars[k]);
        if (p < 0) {
            out.vars.push_back(b.vars[k]);
            out.dims.push_back(b.dims[k]);
        } else if (a.dims[static_cast<std::size_t>(p)] != b.dims[k]) {
            throw ShapeError("joined coordinate has two different support sizes");
        }
    }
    const std::size_t n = out.cells();
    check_cells(n, max_cells);
    std::array<std::vector<std::size_t>, 2> st{std::vector<std::size_t>(out.vars.size(), 0),
                                               std::vector<std::size_t>(out.vars.size(), 0)};
    auto sa = a.strides();
    auto sb = b.strides();
    for (std::size_t k = 0; k < out.vars.size(); ++k) {
        if (int p = a.position(out.vars[k]); p >= 0) st[0][k] = sa[static_cast<std::size_t>(p)];
        if (int p = b.position(out.vars[k]); p >= 0) st[1][k] = sb[static_cast<std::size_t>(p)];
    }
    out.vals.reserve(n);
    const TruthValue bot = alg.bottom();
    const bool annihilates = c == Connective::tensor || c == Connective::meet;
    odometer<2>(out.dims, st, [&](const std::array<std::size_t, 2>& off) {
        const TruthValue& x = a.vals[off[0]];
        if (annihilates && x == bot) {
            out.vals.push_back(bot);
            return;
        }
        out.vals.push_back(alg.eval(c, x, b.vals[off[1]]));
    });
    return out;
}

Table eliminate(const Table& t, int var, const Algebra& alg) {
    const int p = t.position(var);
    if (p < 0) return t;
    Table out;
    for (std::size_t k = 0; k < t.vars.size(); ++k)
        if (static_cast<int>(k) != p) {
            out.vars.push_back(t.vars[k]);
            out.dims.push_back(t.dims[k]);
        }
    out.vals.assign(out.cells(), alg.bottom());
    auto so = out.strides();
    std::array<std::vector<std::size_t>, 2> st{t.strides(), std::vector<std::size_t>(t.vars.size(), 0)};
    for (std::size_t k = 0, j = 0; k < t.vars.size(); ++k)
        if (static_cast<int>(k) != p) st[1][k] = so[j++];
    odometer<2>(t.dims, st, [&](const std::array<std::size_t, 2>& off) {
        auto& cell = out.vals[off[1]];
        cell = alg.join(cell, t.vals[off[0]]);
    });
    return out;
}

Table reorder(const Table& t, const std::vector<int>& order) {
    if (order == t.vars) return t;
    if (order.size() != t.vars.size()) throw ShapeError("reorder needs a permutation of the table variables");
    Table out;
    out.vars = order;
    auto st = t.strides();
    std::array<std::vector<std::size_t>, 1> s{std::vector<std::size_t>(order.size())};
    for (std::size_t k = 0; k < order.size(); ++k) {
        int p = t.position(order[k]);
        if (p < 0) throw ShapeError("reorder needs a permutation of the table variables");
        out.dims.push_back(t.dims[static_cast<std::size_t>(p)]);
        s[0][k] = st[static_cast<std::size_t>(p)];
    }
    out.vals.reserve(t.vals.size());
    odometer<1>(out.dims, s, [&](const std::array<std::size_t, 1>& off) { out.vals.push_back(t.vals[off[0]]); });
    return out;
}

Table bind(const std::vector<int>& vars, const std::vector<std::size_t>& dims, const std::vector<TruthValue>& vals) {
    Table out;
    std::vector<std::size_t> full(vars.size(), 1);
    for (std::size_t k = vars.size(); k-- > 1;) full[k - 1] = full[k] * dims[k];
    std::vector<std::size_t> stride;
    for (std::size_t k = 0; k < vars.size(); ++k) {
        int p = out.position(vars[k]);
        if (p < 0) {
            out.vars.push_back(vars[k]);
            out.dims.push_back(dims[k]);
            stride.push_back(full[k]);
        } else {
            if (out.dims[static_cast<std::size_t>(p)] != dims[k])
                throw ShapeError("repeated coordinate has two different support sizes");
            stride[static_cast<std::size_t>(p)] += full[k];
        }
    }
    if (out.vars.size() == vars.size()) return Table{vars, dims, vals};
    std::array<std::vector<std::size_t>, 1> s{stride};
    out.vals.reserve(out.cells());
    odometer<1>(out.dims, s, [&](const std::array<std::size_t, 1>& off) { out.vals.push_back(vals[off[0]]); });
    return out;
}

Table eliminate_all_but(std::vector<Table> factors, const std::vector<int>& keep, const Algebra& alg,
                        std::size_t max_cells) {
    std::set<int> hidden;
    std::vector<std::pair<int, std::size_t>> dims_of;
    for (const auto& f : factors)
        for (std::size_t k = 0; k < f.vars.size(); ++k) {
            if (std::find(keep.begin(), keep.end(), f.vars[k]) == keep.end()) hidden.insert(f.vars[k]);
            dims_of.emplace_back(f.vars[k], f.dims[k]);
        }
    auto dim = [&](int v) {
        for (auto& [id, d] : dims_of)
            if (id == v) return d;
        return std::size_t{1};
    };
    while (!hidden.empty()) {
        int best = *hidden.begin();
        std::size_t best_cost = SIZE_MAX;
        for (int v : hidden) {
            std::set<int> scope;
            for (const auto& f : factors)
                if (f.position(v) >= 0) scope.insert(f.vars.begin(), f.vars.end());
            std::size_t cost = 1;
            for (int s : scope) cost = cost > SIZE_MAX / dim(s) ? SIZE_MAX : cost * dim(s);
            if (cost < best_cost) {
                best_cost = cost;
                best = v;
            }
        }
        check_cells(best_cost, max_cells);
        Table acc = constant_table(alg.top());
        std::vector<Table> rest;
        for (auto& f : factors) {
            if (f.position(best) >= 0) acc = combine(acc, f, alg, Connective::tensor, max_cells);
            else rest.push_back(std::move(f));
        }
        rest.push_back(eliminate(acc, best, alg));
        factors = std::move(rest);
        hidden.erase(best);
    }
    Table acc = constant_table(alg.top());
    for (const auto& f : factors) acc = combine(acc, f, alg, Connective::tensor, max_cells);
    // variables in `keep` that no factor mentions do not occur; callers pass factors covering keep
    return reorder(acc, keep);
}

}  // namespace osk::detail
