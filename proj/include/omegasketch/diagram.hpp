#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "omegasketch/relation.hpp"

namespace osk {

struct Vertex {
    std::string id;
    std::string sign;
};

// Tentacles may repeat a vertex.
struct Arrow {
    std::string id;
    std::string label;
    std::vector<std::string> sources;
    std::vector<std::string> targets;
};

struct MultiGraph {
    std::vector<Vertex> vertices;
    std::vector<Arrow> arrows;

    void validate() const;  // unique ids, endpoints resolve
    const Vertex& vertex(const std::string& id) const;
    const Arrow& arrow(const std::string& id) const;
    std::optional<std::size_t> vertex_index(const std::string& id) const;
    bool has_incoming(const std::string& vid) const;
    bool has_outgoing(const std::string& vid) const;
};

// Graph plus an Omega-set per vertex and a multi-morphism per arrow. An arrow's
// tentacles (sources then targets) bind positionally to the morphism's source
// then target attributes.
struct MultiDiagram {
    MultiGraph graph;
    std::map<std::string, OmegaSet> vertex_sets;
    std::map<std::string, MultiMorphism> arrow_maps;
    std::vector<std::string> sources;
    std::vector<std::string> targets;

    void validate() const;
    const Algebra& algebra() const;
    const OmegaSet& set_of(const std::string& vid) const;
    const MultiMorphism& map_of(const std::string& aid) const;
};

struct EvalOptions {
    std::size_t max_cells = kDefaultMaxCells;
};

// Over the full vertex product, attributes named by vertex id in vertex order.
MultiMorphism limit(const MultiDiagram& d, const EvalOptions& opts = {});
MultiMorphism colimit(const MultiDiagram& d, const EvalOptions& opts = {});
// Sup of the limit over every vertex not in `keep`, by variable elimination.
MultiMorphism projected_limit(const MultiDiagram& d, const std::vector<std::string>& keep, const EvalOptions& opts = {});
// Discrete product of the vertex sets: the tensor of extents.
MultiMorphism discrete_product(const MultiDiagram& d, const EvalOptions& opts = {});

struct CommutativityResult {
    bool commutative = false;
    TruthValue degree;
    std::optional<bool> meets_lambda;
    std::string witness;  // source tuple realizing a non-top degree
};

CommutativityResult commutativity(const MultiDiagram& d, const std::optional<TruthValue>& lambda = std::nullopt,
                                  const EvalOptions& opts = {});

// Closed forms over named attributes.
MultiMorphism equalizer(const MultiMorphism& r, const MultiMorphism& s);
MultiMorphism pullback(const MultiMorphism& r, const MultiMorphism& s);
MultiMorphism coequalizer(const MultiMorphism& r, const MultiMorphism& s);
MultiMorphism pushout(const MultiMorphism& r, const MultiMorphism& s);

// Single-arrow diagram whose limit is g, using the arrow [x̄] ⇒ g.
MultiDiagram divisible_decompose(const MultiMorphism& g);

}  // namespace osk
