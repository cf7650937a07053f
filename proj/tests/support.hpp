#pragma once

// Independent reference computations shared by the unit tests and the acceptance run.
// Nothing here calls into the library's evaluation code.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "omegasketch/algebra.hpp"
#include "omegasketch/grammar.hpp"
#include "omegasketch/omega_set.hpp"
#include "omegasketch/relation.hpp"

namespace oracle {

using Table = std::vector<std::vector<int>>;

// Every commutative, associative, monotone operation on the chain 0 < ... < n-1 with
// unit n-1. Bottom absorption follows from monotonicity and the unit.
inline std::vector<Table> chain_tnorms(int n) {
    std::vector<std::pair<int, int>> cells;
    for (int x = 1; x < n - 1; ++x)
        for (int y = x; y < n - 1; ++y) cells.emplace_back(x, y);
    Table t(n, std::vector<int>(n, 0));
    for (int x = 0; x < n; ++x) {
        t[x][n - 1] = x;
        t[n - 1][x] = x;
    }
    std::vector<Table> out;
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == cells.size()) {
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y)
                    for (int z = 0; z < n; ++z)
                        if (t[t[x][y]][z] != t[x][t[y][z]]) return;
            out.push_back(t);
            return;
        }
        auto [x, y] = cells[k];
        for (int v = 0; v <= std::min(x, y); ++v) {
            // monotone in both arguments against already fixed neighbours
            if (x > 0 && t[x - 1][y] > v) continue;
            if (y > x && t[x][y - 1] > v) continue;
            t[x][y] = t[y][x] = v;
            rec(k + 1);
        }
        t[x][y] = t[y][x] = 0;
    };
    rec(0);
    return out;
}

// x ⇒ y = max { z : x ⊗ z ≤ y }
inline Table residuum(const Table& t) {
    const int n = static_cast<int>(t.size());
    Table r(n, std::vector<int>(n, 0));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z)
                if (t[x][z] <= y) r[x][y] = z;
    return r;
}

inline bool divisible(const Table& t) {
    auto r = residuum(t);
    const int n = static_cast<int>(t.size());
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (t[x][r[x][y]] != std::min(x, y)) return false;
    return true;
}

inline std::vector<std::string> labels(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back("e" + std::to_string(i));
    return out;
}

// Scalar t-norms on [0,1] written out directly.
struct Scalar {
    std::string name;
    double (*tensor)(double, double);
    double (*implies)(double, double);
};

inline std::vector<Scalar> scalars() {
    return {
        {"lukasiewicz", [](double x, double y) { return std::max(0.0, x + y - 1); },
         [](double x, double y) { return std::min(1.0, 1 - x + y); }},
        {"goedel", [](double x, double y) { return std::min(x, y); },
         [](double x, double y) { return x <= y ? 1.0 : y; }},
        {"product", [](double x, double y) { return x * y; },
         [](double x, double y) { return x <= y ? 1.0 : y / x; }},
    };
}

inline osk::Algebra algebra_of(const std::string& name) {
    if (name == "lukasiewicz") return osk::Algebra::lukasiewicz();
    if (name == "goedel") return osk::Algebra::goedel();
    return osk::Algebra::product_tnorm();
}

// Dense matrix over plain doubles, used by the reference composition.
using Matrix = std::vector<std::vector<double>>;

inline Matrix compose(const Matrix& f, const Matrix& g, double (*tensor)(double, double)) {
    Matrix out(f.size(), std::vector<double>(g.empty() ? 0 : g[0].size(), 0.0));
    for (std::size_t a = 0; a < f.size(); ++a)
        for (std::size_t c = 0; c < out[a].size(); ++c)
            for (std::size_t b = 0; b < g.size(); ++b) out[a][c] = std::max(out[a][c], tensor(f[a][b], g[b][c]));
    return out;
}

inline Matrix transpose(const Matrix& f) {
    Matrix out(f.empty() ? 0 : f[0].size(), std::vector<double>(f.size()));
    for (std::size_t a = 0; a < f.size(); ++a)
        for (std::size_t b = 0; b < f[a].size(); ++b) out[b][a] = f[a][b];
    return out;
}

inline std::vector<std::string> support(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
    return out;
}

// Omega-set with the given extents and bottom off the diagonal.
inline osk::OmegaSet diagonal_set(const std::string& name, const std::vector<double>& extents, const osk::Algebra& alg) {
    const std::size_t n = extents.size();
    std::vector<osk::TruthValue> sim(n * n, alg.bottom());
    for (std::size_t i = 0; i < n; ++i) sim[i * n + i] = extents[i];
    return osk::OmegaSet(name, support(n), std::move(sim), alg);
}

inline osk::MultiMorphism morphism(const Matrix& m, const osk::OmegaSet& a, const osk::OmegaSet& b,
                                   const std::string& in, const std::string& out, const osk::Algebra& alg,
                                   const std::string& name = "m") {
    return osk::MultiMorphism::tabulate(name, {{in, a}, {out, b}}, {in}, {out}, alg,
                                        [&](std::span<const std::size_t> i) { return osk::TruthValue(m[i[0]][i[1]]); });
}

inline Matrix matrix(const osk::MultiMorphism& f, const std::string& row, const std::string& col) {
    auto p = f.permuted({row, col});
    auto shape = p.shape();
    Matrix out(shape[0], std::vector<double>(shape[1]));
    for (std::size_t i = 0; i < shape[0]; ++i)
        for (std::size_t j = 0; j < shape[1]; ++j) out[i][j] = p.at({i, j}).scalar();
    return out;
}

inline double max_diff(const Matrix& a, const Matrix& b) {
    if (a.size() != b.size()) return INFINITY;
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size()) return INFINITY;
        for (std::size_t j = 0; j < a[i].size(); ++j) d = std::max(d, std::abs(a[i][j] - b[i][j]));
    }
    return d;
}

// Random matrix whose row and column suprema become the extents: total and faithful
// by construction.
struct TotalFaithful {
    Matrix m;
    std::vector<double> row_extent, col_extent;
};

inline TotalFaithful random_total_faithful(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    TotalFaithful r;
    r.m.assign(rows, std::vector<double>(cols));
    for (auto& row : r.m)
        for (auto& v : row) v = u(rng) < 0.2 ? 0.0 : u(rng);
    r.row_extent.assign(rows, 0.0);
    r.col_extent.assign(cols, 0.0);
    for (std::size_t a = 0; a < rows; ++a)
        for (std::size_t b = 0; b < cols; ++b) {
            r.row_extent[a] = std::max(r.row_extent[a], r.m[a][b]);
            r.col_extent[b] = std::max(r.col_extent[b], r.m[a][b]);
        }
    return r;
}

// String gluing written recursively: cancel the first output of w that has a partner
// in w2 (exact dual first, then a strict generalization), then glue what remains.
inline osk::Word glue(const osk::Word& w, const osk::Word& w2, const osk::Ontology& ont) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i].empty() || w[i].back() != '+') continue;
        std::string want = w[i].substr(0, w[i].size() - 1);
        auto j = std::find(w2.begin(), w2.end(), want);
        if (j == w2.end())
            j = std::find_if(w2.begin(), w2.end(), [&](const std::string& s) { return s != want && ont.leq(want, s); });
        if (j == w2.end()) continue;
        osk::Word a = w, b = w2;
        a.erase(a.begin() + static_cast<std::ptrdiff_t>(i));
        b.erase(b.begin() + (j - w2.begin()));
        return glue(a, b, ont);
    }
    osk::Word out = w;
    out.insert(out.end(), w2.begin(), w2.end());
    return out;
}

}  // namespace oracle
