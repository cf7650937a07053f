#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "omegasketch/relation.hpp"

namespace osk {

// Omega-map over the target attributes of a relation, for one observed description.
struct Classifier {
    MultiMorphism map;
    TruthValue given_extent;
    std::vector<std::string> warnings;
};

// Partial assignment of source attributes: attribute name -> element label.
using Description = std::map<std::string, std::string>;

// b ↦ [a] ⇒ f(a, b). Unassigned non-target attributes are marginalized by sup.
// alpha defaults to the product of the source attribute sets.
Classifier condition(const MultiMorphism& f, const Description& given,
                     const std::optional<OmegaSet>& alpha = std::nullopt);

// c' ↦ ⋁_b c(b) ⊗ g(b, c').
Classifier chain(const Classifier& c, const MultiMorphism& g);

// (c, d) ↦ c1(c) ⊗ c2(d); when both classifiers range over the same attributes the
// diagonal d ↦ c1(d) ⊗ c2(d) is returned. f and g, when given, are checked for independence.
Classifier combine_independent(const Classifier& c1, const Classifier& c2, const MultiMorphism* f = nullptr,
                               const MultiMorphism* g = nullptr);

}  // namespace osk
