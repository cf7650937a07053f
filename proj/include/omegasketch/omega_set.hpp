#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "omegasketch/algebra.hpp"

namespace osk {

// One coordinate of a product support.
struct Factor {
    std::string name;
    std::vector<std::string> labels;
};

// Finite support with an Omega-valued similarity matrix.
class OmegaSet {
public:
    OmegaSet(std::string name, std::vector<std::string> support, std::vector<TruthValue> similarity, Algebra alg);

    static OmegaSet crisp(std::vector<std::string> support, Algebra alg, std::string name = {});
    static OmegaSet from_rows(std::string name, std::vector<std::string> support,
                              const std::vector<std::vector<TruthValue>>& rows, Algebra alg);

    const std::string& name() const { return name_; }
    std::size_t size() const { return support_.size(); }
    const std::vector<std::string>& support() const { return support_; }
    const std::string& label(std::size_t i) const { return support_[i]; }
    std::optional<std::size_t> find(const std::string& label) const;
    std::size_t index_of(const std::string& label) const;  // throws ReferenceError

    const Algebra& algebra() const { return alg_; }
    const TruthValue& sim(std::size_t i, std::size_t j) const { return sim_[i * support_.size() + j]; }
    const TruthValue& extent(std::size_t i) const { return sim(i, i); }
    const TruthValue& extent(const std::string& label) const { return extent(index_of(label)); }

    // Product structure; empty for atomic sets.
    const std::vector<Factor>& factors() const { return factors_; }
    std::vector<std::size_t> decompose(std::size_t flat) const;

    OmegaSet renamed(std::string name) const;
    // Same support with every similarity value sent through fn into `alg`.
    template <class Fn>
    OmegaSet mapped(const Algebra& alg, Fn&& fn) const {
        std::vector<TruthValue> sim;
        sim.reserve(sim_.size());
        for (const auto& v : sim_) sim.push_back(fn(v));
        OmegaSet out(name_, support_, std::move(sim), alg);
        out.factors_ = factors_;
        return out;
    }

private:
    friend OmegaSet product(std::span<const OmegaSet> parts, std::vector<std::string> names);
    friend OmegaSet observable_projection(const OmegaSet& w, std::span<const std::string> keep);

    std::string name_;
    std::vector<std::string> support_;
    std::vector<TruthValue> sim_;
    Algebra alg_;
    std::vector<Factor> factors_;
};

bool approx_equal(const OmegaSet& a, const OmegaSet& b, double eps = kEps);

struct OmegaSetReport {
    bool symmetric = true;
    bool transitive = true;
    std::size_t symmetry_violations = 0;
    std::size_t transitivity_violations = 0;
    std::vector<std::string> witnesses;  // first few, human readable
    bool ok() const { return symmetric && transitive; }
};

// Lenient mode records violations as report content; strict mode throws PreconditionError.
OmegaSetReport validate(const OmegaSet& w, bool strict = false);

// Cartesian product; labels join component labels with ','. Factor names default to
// the component set names. A single input is returned unchanged.
OmegaSet product(std::span<const OmegaSet> parts, std::vector<std::string> names = {});

// Keeps the named factors; each similarity entry is the sup over hidden coordinates.
OmegaSet observable_projection(const OmegaSet& w, std::span<const std::string> keep);

std::string join_labels(std::span<const std::string> labels);

}  // namespace osk
