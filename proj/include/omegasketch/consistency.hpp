#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "omegasketch/relation.hpp"

namespace osk {

// Concept descriptions are Omega-maps: multi-morphisms with no designation.

// Pointwise d0 ⇔ d1. Signatures must coincide or one must contain the other; a smaller
// d0 compares against the sup-projection of d1, a larger one against its cylinder.
MultiMorphism gamma(const MultiMorphism& d0, const MultiMorphism& d1);
TruthValue similarity_degree(const MultiMorphism& d0, const MultiMorphism& d1);

enum class ModelMode { forall, exists, on_domain };

struct ModelResult {
    bool holds = false;
    std::vector<std::size_t> witnesses;  // flat indices of gamma cells reaching lambda
    MultiMorphism gamma;
};

// domain: flat indices into gamma(d, MD), used by on_domain.
ModelResult models(const MultiMorphism& d, const MultiMorphism& md, const TruthValue& lambda, ModelMode mode,
                   const std::set<std::size_t>& domain = {});

// f ≤ g wherever `guard` is exactly top; without a guard everywhere.
bool guarded_leq(const MultiMorphism& f, const MultiMorphism& g, const MultiMorphism* guard = nullptr);

struct PoolDiagram {
    std::string name;
    MultiMorphism map;  // relation interpretation M(D)
};

// Finite stand-in for the language and the concept space. Concepts share one signature.
struct Pool {
    std::vector<MultiMorphism> concepts;
    std::vector<PoolDiagram> diagrams;

    void validate() const;
    std::size_t diagram_index(const std::string& name) const;  // throws ReferenceError
};

using Indices = std::vector<std::size_t>;

// Answer sets and the derived operators for one pool and threshold.
class Reasoner {
public:
    Reasoner(const Pool& pool, TruthValue lambda);

    const Pool& pool() const { return *pool_; }
    const TruthValue& lambda() const { return lambda_; }

    // Concepts g with g ⊨λ ∀D over the full support.
    const Indices& answers(std::size_t diagram) const { return answers_.at(diagram); }
    // Pointwise join of the answers of the diagrams in U; bottom when there are none.
    MultiMorphism ans(const Indices& U) const;
    // Pointwise meet of the answers of the diagrams in U; top when there are none.
    MultiMorphism mod(const Indices& U) const;

    Indices box(const MultiMorphism& g) const;
    Indices diamond(const MultiMorphism& g) const;

    // Join of the pool answers below g.
    MultiMorphism interior(const MultiMorphism& g) const;
    // Meet of the pool answers above g; top when there are none.
    MultiMorphism closure(const MultiMorphism& g) const;

    // 𝒜(U): diagrams all of whose answers lie below ans(U).
    Indices consequences(const Indices& U) const;
    // 𝒞(U): diagrams with an answer above mod(U).
    Indices codified(const Indices& U) const;
    bool entails(const Indices& U, std::size_t diagram) const;

    MultiMorphism bottom() const;
    MultiMorphism top() const;

private:
    const Pool* pool_;
    TruthValue lambda_;
    std::vector<Indices> answers_;
};

// Free-function forms, each building a Reasoner.
Indices ans_lambda(std::size_t diagram, const Pool& pool, const TruthValue& lambda);
Indices box(const MultiMorphism& g, const Pool& pool, const TruthValue& lambda);
Indices diamond(const MultiMorphism& g, const Pool& pool, const TruthValue& lambda);
MultiMorphism interior(const MultiMorphism& g, const Pool& pool, const TruthValue& lambda);
MultiMorphism closure(const MultiMorphism& g, const Pool& pool, const TruthValue& lambda);
bool consequence(const Indices& U, std::size_t diagram, const Pool& pool, const TruthValue& lambda);

// Formulas over pool diagram names: `*` ⊗, `->` ⇒ (right associative, loosest),
// `|` ∨, `&` ∧, prefix [I] and [C], parentheses.
struct Formula {
    enum class Kind { atom, tensor, implies, meet, join, interior, closure };
    Kind kind = Kind::atom;
    std::string atom;
    std::vector<std::shared_ptr<const Formula>> args;
};

Formula parse_formula(const std::string& text);  // throws InputError with the offset
std::string format_formula(const Formula& f);

// g ⊨λ φ. Atoms hold when the similarity degree reaches λ; [I] and [C] evaluate the
// body on int_λ(g) and cl_λ(g); a connective holds when λ ≤ deg φ0 op deg φ1.
bool eval_rl(const Formula& phi, const MultiMorphism& g, const Pool& pool, const TruthValue& lambda);
// Greatest λ over the candidate grid with g ⊨λ φ.
TruthValue rl_degree(const Formula& phi, const MultiMorphism& g, const Pool& pool);

}  // namespace osk
