#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "omegasketch/algebra.hpp"
#include "omegasketch/omega_set.hpp"

namespace osk {

inline constexpr std::size_t kDefaultMaxCells = 10'000'000;

struct Attribute {
    std::string name;
    OmegaSet set;
};

// Omega-valued tensor over a named product of supports, with source and target
// attribute lists. Attributes in neither list are allowed (limits over full vertex sets).
class MultiMorphism {
public:
    MultiMorphism(std::string name, Algebra alg, std::vector<Attribute> attrs, std::vector<std::string> sources,
                  std::vector<std::string> targets, std::vector<TruthValue> values);

    static MultiMorphism constant(std::string name, std::vector<Attribute> attrs, std::vector<std::string> sources,
                                  std::vector<std::string> targets, const TruthValue& v, const Algebra& alg);
    static MultiMorphism tabulate(std::string name, std::vector<Attribute> attrs, std::vector<std::string> sources,
                                  std::vector<std::string> targets, const Algebra& alg,
                                  const std::function<TruthValue(std::span<const std::size_t>)>& fn);

    const std::string& name() const { return name_; }
    const Algebra& algebra() const { return alg_; }
    const std::vector<Attribute>& attributes() const { return attrs_; }
    const std::vector<std::string>& sources() const { return sources_; }
    const std::vector<std::string>& targets() const { return targets_; }
    std::size_t rank() const { return attrs_.size(); }
    std::vector<std::size_t> shape() const;
    std::size_t cell_count() const { return values_.size(); }

    const std::vector<TruthValue>& values() const { return values_; }
    const TruthValue& value(std::size_t flat) const { return values_[flat]; }
    const TruthValue& at(std::span<const std::size_t> idx) const { return values_[flat_index(idx)]; }
    const TruthValue& at(std::initializer_list<std::size_t> idx) const;
    void set(std::span<const std::size_t> idx, const TruthValue& v);
    std::size_t flat_index(std::span<const std::size_t> idx) const;
    std::vector<std::size_t> unflatten(std::size_t flat) const;

    std::optional<std::size_t> attribute_index(const std::string& name) const;
    const Attribute& attribute(const std::string& name) const;  // throws ReferenceError
    std::vector<std::string> attribute_names() const;

    MultiMorphism renamed(std::string name) const;
    MultiMorphism with_designation(std::vector<std::string> sources, std::vector<std::string> targets) const;
    MultiMorphism rename_attributes(const std::map<std::string, std::string>& mapping) const;
    MultiMorphism permuted(const std::vector<std::string>& order) const;
    // Every value mapped through fn; the algebra may change with it.
    MultiMorphism mapped(const Algebra& alg, const std::function<TruthValue(const TruthValue&)>& fn) const;

    // Human readable tuple label, e.g. "(0, 1)".
    std::string tuple_label(std::size_t flat) const;

private:
    std::string name_;
    Algebra alg_;
    std::vector<Attribute> attrs_;
    std::vector<std::string> sources_;
    std::vector<std::string> targets_;
    std::vector<TruthValue> values_;
};

// Graph of a total function between supports; map[i] is the image of element i.
struct SetMap {
    std::vector<std::size_t> map;

    static SetMap from_labels(const OmegaSet& from, const OmegaSet& to,
                              const std::vector<std::pair<std::string, std::string>>& pairs);
    // Crisp characteristic multi-morphism chi_f with one source and one target attribute.
    MultiMorphism chi(const OmegaSet& from, const OmegaSet& to, std::string in = "x", std::string out = "y") const;
};

// Crisp identity 1_A between two attribute names over the same support.
MultiMorphism identity(const OmegaSet& a, std::string in, std::string out);
// The similarity [.=.] as an in ⇀ out multi-morphism.
MultiMorphism similarity_morphism(const OmegaSet& a, std::string in, std::string out);
// Similarity of a product of attributes: sources `ins` to targets `outs`, pairwise.
MultiMorphism similarity_morphism(std::span<const Attribute> attrs, std::vector<std::string> ins,
                                  std::vector<std::string> outs);

// Pointwise connective with a natural join on shared names; sources and targets are
// unions in order of appearance.
MultiMorphism pointwise(const MultiMorphism& f, const MultiMorphism& g, Connective c,
                        std::size_t max_cells = kDefaultMaxCells);
// Sup over the named attributes.
MultiMorphism marginalize(const MultiMorphism& f, std::span<const std::string> names);
// Tensor of extents [x̄] over the named attributes.
MultiMorphism extents(std::span<const Attribute> attrs, const Algebra& alg);

// Sup-tensor composition joining T(f) ∩ S(g); other shared names are a natural join.
MultiMorphism compose(const MultiMorphism& f, const MultiMorphism& g, std::size_t max_cells = kDefaultMaxCells);
MultiMorphism transpose(const MultiMorphism& f);

// Default alpha / beta are the products of the source / target attribute sets.
bool is_total(const MultiMorphism& f, const std::optional<OmegaSet>& alpha = std::nullopt, double eps = kEps);
bool is_faithful(const MultiMorphism& f, const std::optional<OmegaSet>& beta = std::nullopt, double eps = kEps);

struct Classification {
    bool epi = false;
    bool mono = false;
    bool iso = false;
    bool orthogonal = false;
};
Classification classify(const MultiMorphism& f, const std::optional<OmegaSet>& alpha = std::nullopt,
                        const std::optional<OmegaSet>& beta = std::nullopt, double eps = kEps);

// d0 ⊗_{K1} d1 ⊗_{K2} ... as a left fold. keys[k] lists the key attributes shared by
// the accumulated product and ds[k]; a key is summed out after its last use.
MultiMorphism indexed_join(const MultiMorphism& d0, std::span<const MultiMorphism> ds,
                           const std::vector<std::vector<std::string>>& keys,
                           std::size_t max_cells = kDefaultMaxCells);

struct IndependenceResult {
    bool independent = false;
    std::string witness;
};
IndependenceResult independent(const MultiMorphism& f, const MultiMorphism& g, double eps = kEps);

// Values compared after aligning attributes by name; designations are ignored.
bool approx_equal(const MultiMorphism& f, const MultiMorphism& g, double eps = kEps);
// First cell where the two differ, if any.
std::optional<std::string> first_difference(const MultiMorphism& f, const MultiMorphism& g, double eps = kEps);

}  // namespace osk
