#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "omegasketch/diagram.hpp"

namespace osk {

using Word = std::vector<std::string>;

Word parse_word(const std::string& text);
std::string format_word(const Word& w);

// Bipolarized ontology. Input signs are plain labels; each has an output dual
// spelled with a trailing '+'. The order is declared on input signs and mirrored
// on their duals.
class Ontology {
public:
    Ontology() = default;
    Ontology(std::vector<std::string> inputs, const std::vector<std::pair<std::string, std::string>>& order);

    const std::vector<std::string>& inputs() const { return inputs_; }
    bool contains(const std::string& s) const;
    static bool is_output(const std::string& s) { return !s.empty() && s.back() == '+'; }
    static bool is_input(const std::string& s) { return !is_output(s); }
    static std::string dual(const std::string& s);
    // Order on signs of one polarity; mixed polarities are incomparable.
    bool leq(const std::string& a, const std::string& b) const;
    void require(const Word& w) const;  // throws ReferenceError on unknown signs
    // Adds a sign with no order relations; no-op when present.
    void add(const std::string& input_sign);
    std::vector<std::pair<std::string, std::string>> order_pairs() const;  // strict pairs, inputs only

private:
    std::vector<std::string> inputs_;
    std::set<std::pair<std::string, std::string>> leq_;  // reflexive-transitive closure on inputs
};

struct WordIO {
    Word inputs;
    Word outputs;
};
WordIO word_io(const Word& w);

// Record of one run of the gluing algorithm: positions cancelled in each word.
struct GlueTrace {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (position in w, position in w')
    std::vector<std::size_t> left_residue;
    std::vector<std::size_t> right_residue;
};
GlueTrace glue_trace(const Word& w, const Word& w2, const Ontology& ont);
Word glue_words(const Word& w, const Word& w2, const Ontology& ont);

class Library {
public:
    Ontology ontology;
    std::map<std::string, Word> components;
    std::vector<std::pair<std::string, std::string>> equiv_labels;
    std::vector<std::pair<Word, Word>> equiv_words;
    // Rename pairs (auxiliary sign, principal sign).
    std::vector<std::pair<std::string, std::string>> auxiliary;

    const Word& word(const std::string& label) const;  // throws ReferenceError
    bool has(const std::string& label) const { return components.count(label) > 0; }
    bool labels_equivalent(const std::string& a, const std::string& b) const;
    bool words_equivalent(const Word& a, const Word& b) const;
    // Unknown signs and equivalent labels with inequivalent words.
    std::vector<std::string> problems() const;
};

MultiGraph parser_graph(const Library& lib);

// A multi-graph labelled by library components (arrows) and input signs (vertices),
// with an optional source/target designation for evaluation.
struct Configuration {
    std::string name;
    MultiGraph graph;
    std::vector<std::string> sources;
    std::vector<std::string> targets;
};

// Vertices without incoming arrows, and vertices without outgoing arrows (as duals).
struct Boundary {
    std::vector<std::string> input_vertices;
    std::vector<std::string> output_vertices;
    Word inputs;
    Word outputs;
    Word word() const;
};
Boundary boundary(const Configuration& d);

struct ConfigurationReport {
    bool valid = true;
    std::vector<std::string> violations;
    Word inputs;
    Word outputs;
};
ConfigurationReport validate_configuration(const Configuration& d, const Library& lib);

// D ⊗ D': output vertices of D identified with input vertices of D' following the
// gluing of their boundary words. Ids of D' are renamed when they collide with D.
Configuration glue_diagrams(const Configuration& d, const Configuration& d2, const Ontology& ont);

using RefinementRules = std::map<std::string, Configuration>;
// One parallel step: every arrow with a rule is replaced by its expansion.
Configuration apply_refinement(const RefinementRules& rules, const Configuration& d, const Library& lib);
Configuration normal_form(const RefinementRules& rules, const Configuration& d, const Library& lib,
                          std::size_t max_steps = 64);

}  // namespace osk
