#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "omegasketch/diagram.hpp"
#include "omegasketch/grammar.hpp"

namespace osk {

// (component, configuration, input vertices, output vertices); empty vertex lists
// default to the configuration boundary.
struct Constraint {
    std::string component;
    Configuration diagram;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
};

struct SignSystem {
    Library library;
    std::vector<Configuration> E;  // sources default to the input boundary
    std::vector<Constraint> U;
    std::vector<Constraint> coU;
    std::string omega_sign = "l";
    std::size_t max_arity = 4;  // diagonal / codiagonal arity cap
};

// Component interpretation. An Omega-valued relation keeps only its input attributes;
// it is lifted to (ā, v) ↦ r(ā) ⇔ v when placed in a diagram.
struct Interpretation {
    MultiMorphism map;
    bool omega_valued = false;
};

struct Model {
    Algebra algebra = Algebra::boolean();
    std::map<std::string, OmegaSet> signs;
    std::map<std::string, Interpretation> components;
    std::vector<TruthValue> omega_grid;  // empty: derived from the model values
};

struct Semiotic {
    SignSystem system;
    Model model;
};

inline constexpr std::size_t kMaxOmegaGrid = 64;

// Truth values the Omega sign ranges over: the explicit grid, or every value in the
// model tables plus bottom and top, closed under ⇒, ∧, ∨ up to kMaxOmegaGrid elements.
std::vector<TruthValue> omega_grid(const Semiotic& s);
// The Omega sign as an Omega-set over the grid with similarity u ⇔ v.
OmegaSet omega_set(const Semiotic& s);

// Library extended with the builtin component words: diag<n>_<s>, codiag<n>_<s>,
// eq_<s>, r_<a>_<b> for auxiliary pairs, top, bot, otimes, implies, meet, join.
Library effective_library(const SignSystem& sys);
bool is_builtin(const SignSystem& sys, const std::string& label);
Interpretation builtin_interpretation(const Semiotic& s, const std::string& label);

// Auxiliary signs fall back to the set of their principal sign.
OmegaSet sign_set(const Semiotic& s, const std::string& sign);
// Model entry, or the builtin when the model has none. Throws ReferenceError.
Interpretation component_interpretation(const Semiotic& s, const std::string& label);
// Omega-valued relations lifted; attributes renamed by position: in0, in1, ... then out0, ...
MultiMorphism lifted_map(const Semiotic& s, const std::string& label);

MultiDiagram instantiate(const Semiotic& s, const Configuration& d);

struct InterpretOptions {
    bool colimit = false;
    EvalOptions eval;
};
// Sup of Lim MD (or coLim MD) over internal vertices, leaving the boundary vertices:
// sources are the input boundary, targets the output boundary.
MultiMorphism interpret(const Semiotic& s, const Configuration& d, const InterpretOptions& opts = {});

// For a relation: ā ↦ M(D)(ā, ⊤) over the input boundary.
MultiMorphism relation_map(const Semiotic& s, const Configuration& d, const EvalOptions& opts = {});

struct ModelCheck {
    std::string kind;     // e-totality, u-limit, cou-colimit, equivalence, ontology, epi, signature, word, config
    std::string subject;  // diagram name, component label or sign
    bool passed = true;
    bool advisory = false;
    std::string detail;
};

struct ModelReport {
    std::vector<ModelCheck> checks;
    bool ok() const;
    std::vector<const ModelCheck*> failures() const;
};

struct ValidateOptions {
    bool strict = false;  // epi failures count as errors
    EvalOptions eval;
};
ModelReport validate_model(const Semiotic& s, const ValidateOptions& opts = {});

struct WordClass {
    bool relation = false;
    bool equation = false;
    bool truth = false;
    std::string detail;
};
WordClass classify_word(const Semiotic& s, const Configuration& d, const EvalOptions& opts = {});

// I ⊗ D0 ⊗ D1 ⊗ 'conn': links pair input vertices of d0 with input vertices of d1;
// each pair is fed by a fresh vertex through diag2. Outputs meet in the connective.
Configuration lift_connective(const Semiotic& s, const Configuration& d0, const Configuration& d1, Connective conn,
                              const std::vector<std::pair<std::string, std::string>>& links);

// Union of sign systems over the product of their algebras. Sign similarities and
// component values become tuples holding the value from each semiotic that
// interprets the sign or label and top elsewhere.
Semiotic integrate(const std::vector<Semiotic>& parts);

// ⊗ of the vertex interpretations ⊗ (⋁ of the connecting arrows); attributes match by name.
MultiMorphism integration_schema_colimit(const std::vector<MultiMorphism>& vertices,
                                         const std::vector<MultiMorphism>& arrows);

// Word of the configuration in string notation with rename components, e.g.
// "diag2_s r(s,x1) r(s,x2) r(x1,s) r(x2,s) geq r(l,v) ...".
std::string encode_string(const Configuration& d);

}  // namespace osk
