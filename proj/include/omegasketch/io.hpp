#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "omegasketch/consistency.hpp"
#include "omegasketch/diagram.hpp"
#include "omegasketch/semiotic.hpp"

namespace osk::io {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// A JSON document and the directory its relative references resolve against.
struct Doc {
    Json json;
    fs::path dir;
    std::string origin;  // file name or "<inline>"
};

// Parse errors carry file and line.
Json read_json(const fs::path& path);
// Strings naming .json/.csv files are loaded relative to `dir`; anything else is inline.
Doc deref(const Json& j, const fs::path& dir, const std::string& origin = "<inline>");
Doc load(const fs::path& path);

std::string fixed6(double v);
std::string format_value(const TruthValue& v, const Algebra& alg);

Algebra parse_algebra(const Json& j);
Json algebra_to_json(const Algebra& alg);
// Numbers, chain labels, "top"/"bot", arrays for products.
TruthValue parse_value(const Json& j, const Algebra& alg);
Json value_to_json(const TruthValue& v, const Algebra& alg);

// Arithmetic over named reals: + - * / ^, unary minus, exp, log, sqrt, abs, min, max.
double eval_expression(const std::string& expr, const std::map<std::string, double>& vars);

using SetRegistry = std::map<std::string, OmegaSet>;

// {"name","support","similarity"}; generated forms take {"range":[lo,hi,step]} as support and
// an "extent" expression in "variable" or a "similarity" expression in x and y.
OmegaSet parse_omega_set(const Doc& d, const Algebra& alg, const std::string& fallback_name = {});
// Header row holds the support, the remaining rows the similarity matrix.
OmegaSet read_omega_set_csv(const fs::path& path, const Algebra& alg, const std::string& name);
// Dispatches on the referenced file type.
OmegaSet load_omega_set(const Json& ref, const fs::path& dir, const Algebra& alg, const std::string& name);
Json omega_set_to_json(const OmegaSet& w);

// Cells come from "rows" ({"at": labels, "value"}), a flat "values" array or an
// "expression" over numeric labels; unspecified cells hold "default" (bottom).
MultiMorphism parse_relation(const Doc& d, const Algebra& alg, const SetRegistry& sets);
Json relation_to_json(const MultiMorphism& m);

Configuration parse_configuration(const Doc& d);
Json configuration_to_json(const Configuration& c);

// Self-contained diagram: "algebra", "sets", "relations", vertices with "set",
// arrows with "relation".
MultiDiagram parse_diagram(const Doc& d);

Library parse_library(const Doc& d);
SignSystem parse_sign_system(const Doc& d);
Model parse_model(const Doc& d, const SignSystem& sys);
Semiotic load_semiotic(const Doc& signsystem, const Doc& model);

// {"algebra","sets","concepts":[...],"diagrams":[{"name","relation"}|{"name","diagram"}],
//  "signsystem","model"}; configurations are evaluated as relations in the semiotic.
Pool parse_pool(const Doc& d);
// Concept file: a relation document, possibly with its own "algebra" and "sets".
MultiMorphism parse_concept(const Doc& d, const Algebra* alg = nullptr, const SetRegistry* sets = nullptr);

// Workspace manifest: {"<kind>": {"<name>": ref}} for kinds such as sets, relations,
// diagrams, signsystems, models, pools, concepts.
class Workspace {
public:
    Workspace() = default;
    explicit Workspace(const fs::path& manifest);
    // Environment variable OMEGASKETCH_WORKSPACE when set.
    static Workspace from_environment();

    bool empty() const { return entries_.empty(); }
    // Entity name in the manifest, or else a file path.
    Doc resolve(const std::string& kind, const std::string& arg) const;
    std::vector<std::string> names(const std::string& kind) const;

private:
    fs::path dir_;
    std::map<std::string, std::map<std::string, Json>> entries_;
};

}  // namespace osk::io
