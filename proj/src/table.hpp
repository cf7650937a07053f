#pragma once

// Dense Omega-valued tables over integer-named variables. Internal to the library:
// composition, limits and variable elimination are all built from combine/eliminate.

#include <cstddef>
#include <vector>

#include "omegasketch/algebra.hpp"

namespace osk::detail {

struct Table {
    std::vector<int> vars;          // unique variable ids
    std::vector<std::size_t> dims;  // one per variable
    std::vector<TruthValue> vals;   // row-major, last variable fastest

    std::size_t cells() const;
    std::vector<std::size_t> strides() const;
    int position(int var) const;  // -1 when absent
};

Table constant_table(TruthValue v);

// Pointwise `c` with a natural join on shared variables. Result variables are
// a.vars followed by the variables of b not in a.
Table combine(const Table& a, const Table& b, const Algebra& alg, Connective c, std::size_t max_cells);

// Sup over one variable.
Table eliminate(const Table& t, int var, const Algebra& alg);

// Same table with variables listed in `order` (a permutation of t.vars).
Table reorder(const Table& t, const std::vector<int>& order);

// Table over a variable list that may repeat ids; repeated coordinates are read on the
// diagonal so the result mentions each id once.
Table bind(const std::vector<int>& vars, const std::vector<std::size_t>& dims, const std::vector<TruthValue>& vals);

// Sup over every variable not listed in `keep`, eliminating cheapest first.
// `factors` are combined with the tensor; result is ordered as `keep`.
Table eliminate_all_but(std::vector<Table> factors, const std::vector<int>& keep, const Algebra& alg,
                        std::size_t max_cells);

void check_cells(std::size_t cells, std::size_t max_cells);

}  // namespace osk::detail
