#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "omegasketch/bayes.hpp"
#include "omegasketch/consistency.hpp"
#include "omegasketch/diagram.hpp"
#include "omegasketch/errors.hpp"
#include "omegasketch/grammar.hpp"
#include "omegasketch/io.hpp"
#include "omegasketch/semiotic.hpp"

using namespace osk;
using io::Doc;
using io::Json;

namespace {

constexpr int kOk = 0;
constexpr int kFails = 1;
constexpr int kInputError = 2;

struct Options {
    std::string workspace;
    bool json = false;
    bool dry_run = false;
    std::size_t max_cells = kDefaultMaxCells;

    std::string algebra, set, relation, left, right, out, diagram, signsystem, model, pool, concept_ref, formula;
    std::string given, target, lambda, mode = "forall", format = "string", premises, conclusion, chain_with;
    std::vector<std::string> signsystems, models;
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    bool strict = false, full = false, colimit = false;
};

struct Session {
    const Options& o;
    io::Workspace ws;
    std::ostream& out = std::cout;

    EvalOptions eval() const { return {o.max_cells}; }

    Doc doc(const std::string& kind, const std::string& arg) const {
        if (arg.empty()) throw InputError("missing --" + kind);
        return ws.resolve(kind + "s", arg);
    }

    Algebra algebra_for(const Doc& d) const {
        if (d.json.is_object() && d.json.contains("algebra")) return io::parse_algebra(d.json.at("algebra"));
        if (!o.algebra.empty()) return algebra_arg(o.algebra);
        throw InputError(d.origin + ": no algebra; pass --algebra");
    }

    Algebra algebra_arg(const std::string& arg) const {
        for (const char* n : {"boolean", "goedel", "godel", "product", "lukasiewicz"})
            if (arg == n) return io::parse_algebra(Json(arg));
        return io::parse_algebra(doc("algebra", arg).json);
    }

    io::SetRegistry sets_arg(const Algebra& alg) const {
        io::SetRegistry sets;
        if (!o.set.empty()) {
            auto d = doc("set", o.set);
            auto w = io::load_omega_set(d.json.is_string() ? Json(o.set) : d.json, d.dir, alg, "");
            sets.emplace(w.name(), w);
        }
        return sets;
    }

    MultiMorphism relation(const std::string& arg) const {
        auto d = doc("relation", arg);
        Algebra alg = algebra_for(d);
        return io::parse_relation(d, alg, sets_arg(alg));
    }

    Semiotic semiotic(const std::string& sys, const std::string& model) const {
        return io::load_semiotic(doc("signsystem", sys), doc("model", model));
    }
};

TruthValue parse_cli_value(const std::string& text, const Algebra& alg) {
    char* end = nullptr;
    double x = std::strtod(text.c_str(), &end);
    if (!text.empty() && *end == '\0') return io::parse_value(Json(x), alg);
    return io::parse_value(Json(text), alg);
}

std::string fmt(const Algebra& alg, const TruthValue& v) { return io::format_value(v, alg); }

void print_table(std::ostream& out, const MultiMorphism& m) {
    out << "attributes:";
    for (const auto& a : m.attributes()) out << ' ' << a.name;
    out << '\n';
    for (std::size_t i = 0; i < m.cell_count(); ++i)
        out << m.tuple_label(i) << '\t' << fmt(m.algebra(), m.value(i)) << '\n';
}

void emit(const Session& s, const Json& j, const std::string& text) {
    if (s.o.json) s.out << j.dump(2) << '\n';
    else s.out << text;
}

void emit_table(const Session& s, const MultiMorphism& m, const std::string& title) {
    if (s.o.json) {
        s.out << io::relation_to_json(m).dump(2) << '\n';
        return;
    }
    s.out << title << '\n';
    print_table(s.out, m);
}

int dry(const Session& s, const std::string& what) {
    if (s.o.json) s.out << Json{{"dry_run", true}, {"resolved", what}}.dump(2) << '\n';
    else s.out << "dry run: " << what << " resolved\n";
    return kOk;
}

// ---- subcommands ----

int check_algebra(const Session& s) {
    Algebra alg = s.algebra_arg(s.o.algebra.empty() ? throw InputError("missing --algebra") : s.o.algebra);
    if (s.o.dry_run) return dry(s, alg.name());
    auto report = check_laws(alg, s.o.samples, s.o.seed);
    Json laws = Json::array();
    std::ostringstream txt;
    txt << "algebra " << report.algebra << (report.exhaustive ? " (exhaustive)" : " (sampled)") << '\n';
    for (const auto& l : report.laws) {
        laws.push_back({{"law", l.law}, {"passed", l.passed}, {"checked", l.checked}, {"witness", l.witness}});
        txt << l.law << ": " << (l.passed ? "PASS" : "FAIL") << " (" << l.checked << " checked)";
        if (!l.witness.empty()) txt << " witness " << l.witness;
        txt << '\n';
    }
    txt << "divisible: " << (alg.divisible() ? "yes" : "no") << '\n';
    emit(s, {{"algebra", report.algebra}, {"exhaustive", report.exhaustive}, {"divisible", alg.divisible()}, {"laws", laws}},
         txt.str());
    return report.all_passed() ? kOk : kFails;
}

int validate_omegaset(const Session& s) {
    auto d = s.doc("set", s.o.set);
    Algebra alg = d.json.is_string() ? s.algebra_arg(s.o.algebra) : s.algebra_for(d);
    auto w = io::load_omega_set(d.json.is_string() ? Json(s.o.set) : d.json, d.dir, alg, "");
    if (s.o.dry_run) return dry(s, w.name());
    auto r = validate(w, s.o.strict);
    std::ostringstream txt;
    txt << "set " << w.name() << " (" << w.size() << " elements)\n"
        << "symmetric: " << (r.symmetric ? "PASS" : "FAIL") << " (" << r.symmetry_violations << " violations)\n"
        << "transitive: " << (r.transitive ? "PASS" : "FAIL") << " (" << r.transitivity_violations << " violations)\n";
    for (const auto& wi : r.witnesses) txt << "witness " << wi << '\n';
    emit(s,
         {{"set", w.name()},
          {"symmetric", r.symmetric},
          {"transitive", r.transitive},
          {"symmetry_violations", r.symmetry_violations},
          {"transitivity_violations", r.transitivity_violations},
          {"witnesses", r.witnesses}},
         txt.str());
    return r.ok() ? kOk : kFails;
}

int compose_cmd(const Session& s) {
    auto f = s.relation(s.o.left);
    auto g = s.relation(s.o.right);
    if (s.o.dry_run) return dry(s, f.name() + ", " + g.name());
    auto fg = compose(f, g, s.o.max_cells);
    if (!s.o.out.empty()) {
        std::ofstream file(s.o.out);
        if (!file) throw InputError(s.o.out + ": cannot write");
        file << io::relation_to_json(fg).dump(2) << '\n';
    }
    emit_table(s, fg, "composite " + fg.name());
    return kOk;
}

struct DiagramInput {
    MultiDiagram md;
    std::optional<Semiotic> sem;
    std::optional<Configuration> config;
};

DiagramInput diagram_input(const Session& s) {
    auto d = s.doc("diagram", s.o.diagram);
    if (s.o.signsystem.empty()) return {io::parse_diagram(d), std::nullopt, std::nullopt};
    auto sem = s.semiotic(s.o.signsystem, s.o.model);
    auto cfg = io::parse_configuration(d);
    auto md = instantiate(sem, cfg);
    return {std::move(md), std::move(sem), std::move(cfg)};
}

int limit_cmd(const Session& s, bool co) {
    auto in = diagram_input(s);
    if (s.o.dry_run) return dry(s, std::to_string(in.md.graph.vertices.size()) + " vertices");
    const char* what = co ? "colimit" : "limit";
    if (s.o.full || !in.sem) {
        auto m = co ? colimit(in.md, s.eval()) : limit(in.md, s.eval());
        emit_table(s, m, what);
        return kOk;
    }
    // Relation words read at the top truth value; other words over their boundary.
    auto cls = classify_word(*in.sem, *in.config, s.eval());
    if (cls.relation && !co) {
        emit_table(s, relation_map(*in.sem, *in.config, s.eval()), std::string(what) + " at " + s.o.diagram);
        return kOk;
    }
    emit_table(s, interpret(*in.sem, *in.config, {co, s.eval()}), std::string(what) + " over the boundary");
    return kOk;
}

int commutativity_cmd(const Session& s) {
    auto in = diagram_input(s);
    std::optional<TruthValue> lambda;
    if (!s.o.lambda.empty()) lambda = parse_cli_value(s.o.lambda, in.md.algebra());
    if (s.o.dry_run) return dry(s, std::to_string(in.md.graph.arrows.size()) + " arrows");
    auto r = commutativity(in.md, lambda, s.eval());
    const Algebra& alg = in.md.algebra();
    std::ostringstream txt;
    txt << "degree: " << fmt(alg, r.degree) << '\n';
    txt << "commutative: " << (r.commutative ? "yes" : "no") << '\n';
    if (!r.witness.empty()) txt << "witness: " << r.witness << '\n';
    Json j{{"degree", io::value_to_json(r.degree, alg)}, {"commutative", r.commutative}, {"witness", r.witness}};
    if (lambda) {
        txt << "degree ≥ " << s.o.lambda << ": " << (*r.meets_lambda ? "PASS" : "FAIL") << '\n';
        j["lambda"] = io::value_to_json(*lambda, alg);
        j["meets_lambda"] = *r.meets_lambda;
    }
    emit(s, j, txt.str());
    bool ok = lambda ? *r.meets_lambda : r.commutative;
    return ok ? kOk : kFails;
}

Description parse_given(const std::string& text) {
    Description d;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw InputError("--given expects name=label pairs, got '" + item + "'");
        d[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return d;
}

int bayes_cmd(const Session& s) {
    auto f = s.relation(s.o.relation);
    auto given = parse_given(s.o.given);
    std::optional<MultiMorphism> g;
    if (!s.o.chain_with.empty()) g = s.relation(s.o.chain_with);
    if (s.o.dry_run) return dry(s, f.name());
    auto c = condition(f, given);
    if (g) c = chain(c, *g);
    auto m = c.map;
    if (!s.o.target.empty()) {
        std::vector<std::string> drop;
        for (const auto& a : m.attribute_names())
            if (a != s.o.target) drop.push_back(a);
        m.attribute(s.o.target);
        m = marginalize(m, drop);
    }
    const Algebra& alg = f.algebra();
    // Defining equation [a] ⊗ f(β|a) = f(a,·), checked on the unchained classifier.
    bool equation = true;
    if (!g && s.o.target.empty()) {
        std::vector<std::string> drop;
        for (const auto& a : f.attribute_names())
            if (!given.count(a) && m.attribute_index(a) == std::nullopt) drop.push_back(a);
        auto row = marginalize(f, drop);
        for (std::size_t i = 0; i < m.cell_count(); ++i) {
            auto idx = m.unflatten(i);
            std::vector<std::size_t> full;
            for (const auto& a : row.attributes()) {
                if (auto it = given.find(a.name); it != given.end()) full.push_back(a.set.index_of(it->second));
                else full.push_back(idx[*m.attribute_index(a.name)]);
            }
            equation = equation && alg.approx_equal(alg.tensor(c.given_extent, m.value(i)), row.at(full));
        }
    }
    std::ostringstream txt;
    txt << "given extent: " << fmt(alg, c.given_extent) << '\n';
    for (const auto& w : c.warnings) txt << "warning: " << w << '\n';
    for (std::size_t i = 0; i < m.cell_count(); ++i) txt << m.tuple_label(i) << " -> " << fmt(alg, m.value(i)) << '\n';
    if (!g && s.o.target.empty()) txt << "bayes equation: " << (equation ? "PASS" : "FAIL") << '\n';
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.cell_count(); ++i)
        rows.push_back({{"at", m.tuple_label(i)}, {"value", io::value_to_json(m.value(i), alg)}});
    emit(s,
         {{"given_extent", io::value_to_json(c.given_extent, alg)},
          {"warnings", c.warnings},
          {"classifier", rows},
          {"equation", equation}},
         txt.str());
    return equation ? kOk : kFails;
}

int validate_model_cmd(const Session& s) {
    auto sem = s.semiotic(s.o.signsystem, s.o.model);
    if (s.o.dry_run) return dry(s, std::to_string(sem.model.components.size()) + " component interpretations");
    auto r = validate_model(sem, {s.o.strict, s.eval()});
    Json checks = Json::array();
    std::ostringstream txt;
    for (const auto& c : r.checks) {
        checks.push_back({{"kind", c.kind},
                          {"subject", c.subject},
                          {"passed", c.passed},
                          {"advisory", c.advisory},
                          {"detail", c.detail}});
        txt << c.kind << ' ' << c.subject << ": " << (c.passed ? "PASS" : c.advisory ? "WARN" : "FAIL");
        if (!c.detail.empty()) txt << " (" << c.detail << ')';
        txt << '\n';
    }
    txt << "model: " << (r.ok() ? "valid" : "invalid") << '\n';
    emit(s, {{"valid", r.ok()}, {"checks", checks}}, txt.str());
    return r.ok() ? kOk : kFails;
}

int interpret_cmd(const Session& s) {
    auto sem = s.semiotic(s.o.signsystem, s.o.model);
    auto cfg = io::parse_configuration(s.doc("diagram", s.o.diagram));
    if (s.o.dry_run) return dry(s, cfg.name);
    auto cls = classify_word(sem, cfg, s.eval());
    auto m = interpret(sem, cfg, {s.o.colimit, s.eval()});
    if (s.o.json) {
        auto j = io::relation_to_json(m);
        j["word"] = {{"relation", cls.relation}, {"equation", cls.equation}, {"truth", cls.truth}};
        s.out << j.dump(2) << '\n';
        return kOk;
    }
    s.out << "word: " << format_word(boundary(cfg).word()) << '\n';
    s.out << "relation: " << (cls.relation ? "yes" : "no") << ", equation: " << (cls.equation ? "yes" : "no")
          << ", truth: " << (cls.truth ? "yes" : "no") << '\n';
    print_table(s.out, m);
    return kOk;
}

int glue_cmd(const Session& s) {
    Ontology ont;
    if (!s.o.signsystem.empty()) ont = effective_library(io::parse_sign_system(s.doc("signsystem", s.o.signsystem))).ontology;
    auto is_file = [](const std::string& a) { return a.size() > 5 && a.ends_with(".json"); };
    if (is_file(s.o.left) || is_file(s.o.right)) {
        auto d0 = io::parse_configuration(s.doc("diagram", s.o.left));
        auto d1 = io::parse_configuration(s.doc("diagram", s.o.right));
        if (s.o.dry_run) return dry(s, d0.name + ", " + d1.name);
        auto g = glue_diagrams(d0, d1, ont);
        if (s.o.json) s.out << io::configuration_to_json(g).dump(2) << '\n';
        else s.out << "glued word: " << format_word(boundary(g).word()) << '\n' << io::configuration_to_json(g).dump(2) << '\n';
        return kOk;
    }
    auto w0 = parse_word(s.o.left);
    auto w1 = parse_word(s.o.right);
    if (!s.o.signsystem.empty()) {
        ont.require(w0);
        ont.require(w1);
    }
    if (s.o.dry_run) return dry(s, "words");
    auto trace = glue_trace(w0, w1, ont);
    auto w = glue_words(w0, w1, ont);
    Json pairs = Json::array();
    std::ostringstream txt;
    for (auto [i, j] : trace.pairs) {
        pairs.push_back({i, j});
        txt << "cancel " << w0[i] << " with " << w1[j] << '\n';
    }
    txt << "result: " << format_word(w) << '\n';
    emit(s, {{"result", format_word(w)}, {"cancelled", pairs}}, txt.str());
    return kOk;
}

// Diagram interpretations for the consistency commands: a pool entry, a configuration
// in a semiotic, or a relation file.
struct ConsistencyInput {
    std::optional<Pool> pool;
    std::optional<Semiotic> sem;
};

ConsistencyInput consistency_input(const Session& s) {
    ConsistencyInput in;
    if (!s.o.pool.empty()) in.pool = io::parse_pool(s.doc("pool", s.o.pool));
    if (!s.o.signsystem.empty()) in.sem = s.semiotic(s.o.signsystem, s.o.model);
    return in;
}

MultiMorphism diagram_map(const Session& s, const ConsistencyInput& in, const std::string& name) {
    if (in.pool) return in.pool->diagrams.at(in.pool->diagram_index(name)).map;
    if (in.sem) return relation_map(*in.sem, io::parse_configuration(s.doc("diagram", name)), s.eval());
    return s.relation(name).with_designation({}, {});
}

MultiMorphism concept_arg(const Session& s, const ConsistencyInput& in) {
    auto d = s.doc("concept", s.o.concept_ref);
    if (in.pool && !in.pool->concepts.empty()) {
        for (const auto& c : in.pool->concepts)
            if (c.name() == s.o.concept_ref) return c;
        return io::parse_concept(d, &in.pool->concepts.front().algebra());
    }
    if (in.sem) return io::parse_concept(d, &in.sem->model.algebra, &in.sem->model.signs);
    if (d.json.contains("algebra")) return io::parse_concept(d);
    Algebra alg = s.algebra_for(d);
    return io::parse_concept(d, &alg);
}

ModelMode parse_mode(const std::string& m) {
    if (m == "forall") return ModelMode::forall;
    if (m == "exists") return ModelMode::exists;
    throw InputError("--mode is forall or exists");
}

int consistency_cmd(const Session& s) {
    auto in = consistency_input(s);
    auto g = concept_arg(s, in);
    auto md = diagram_map(s, in, s.o.diagram);
    const Algebra& alg = g.algebra();
    auto lambda = parse_cli_value(s.o.lambda.empty() ? "top" : s.o.lambda, alg);
    auto mode = parse_mode(s.o.mode);
    if (s.o.dry_run) return dry(s, g.name() + ", " + s.o.diagram);
    auto r = models(g, md, lambda, mode);
    auto deg = similarity_degree(g, md);
    std::ostringstream txt;
    txt << "similarity degree: " << fmt(alg, deg) << '\n';
    txt << "witnesses: " << r.witnesses.size() << " of " << r.gamma.cell_count() << '\n';
    txt << "models at " << s.o.mode << ": " << (r.holds ? "PASS" : "FAIL") << '\n';
    emit(s,
         {{"degree", io::value_to_json(deg, alg)},
          {"holds", r.holds},
          {"mode", s.o.mode},
          {"witnesses", r.witnesses.size()},
          {"cells", r.gamma.cell_count()}},
         txt.str());
    return r.holds ? kOk : kFails;
}

const Pool& require_pool(const ConsistencyInput& in) {
    if (!in.pool) throw InputError("missing --pool");
    return *in.pool;
}

Algebra pool_algebra(const Pool& p) {
    if (!p.concepts.empty()) return p.concepts.front().algebra();
    if (!p.diagrams.empty()) return p.diagrams.front().map.algebra();
    throw InputError("pool is empty");
}

Indices diagram_list(const Pool& p, const std::string& text) {
    Indices out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(p.diagram_index(item));
    return out;
}

Json names_json(const Pool& p, const Indices& idx, bool concepts) {
    Json out = Json::array();
    for (auto i : idx) out.push_back(concepts ? p.concepts[i].name() : p.diagrams[i].name);
    return out;
}

int answers_cmd(const Session& s) {
    auto in = consistency_input(s);
    const Pool& pool = require_pool(in);
    auto alg = pool_algebra(pool);
    auto lambda = parse_cli_value(s.o.lambda.empty() ? "top" : s.o.lambda, alg);
    if (s.o.dry_run) return dry(s, std::to_string(pool.diagrams.size()) + " diagrams");
    Reasoner r(pool, lambda);
    Json j = Json::object();
    std::ostringstream txt;
    for (std::size_t d = 0; d < pool.diagrams.size(); ++d) {
        if (!s.o.diagram.empty() && pool.diagrams[d].name != s.o.diagram) continue;
        j[pool.diagrams[d].name] = names_json(pool, r.answers(d), true);
        txt << pool.diagrams[d].name << ':';
        for (auto c : r.answers(d)) txt << ' ' << pool.concepts[c].name();
        txt << '\n';
    }
    emit(s, j, txt.str());
    return kOk;
}

int infer_cmd(const Session& s) {
    auto in = consistency_input(s);
    const Pool& pool = require_pool(in);
    auto alg = pool_algebra(pool);
    auto lambda = parse_cli_value(s.o.lambda.empty() ? "top" : s.o.lambda, alg);
    auto U = diagram_list(pool, s.o.premises);
    if (s.o.dry_run) return dry(s, std::to_string(U.size()) + " premises");
    Reasoner r(pool, lambda);
    auto cons = r.consequences(U);
    std::ostringstream txt;
    txt << "consequences:";
    for (auto d : cons) txt << ' ' << pool.diagrams[d].name;
    txt << '\n';
    Json j{{"consequences", names_json(pool, cons, false)}};
    int rc = kOk;
    if (!s.o.conclusion.empty()) {
        bool e = r.entails(U, pool.diagram_index(s.o.conclusion));
        txt << s.o.premises << " entails " << s.o.conclusion << ": " << (e ? "PASS" : "FAIL") << '\n';
        j["entails"] = e;
        rc = e ? kOk : kFails;
    }
    emit(s, j, txt.str());
    return rc;
}

int rl_eval_cmd(const Session& s) {
    auto in = consistency_input(s);
    const Pool& pool = require_pool(in);
    auto phi = parse_formula(s.o.formula);
    auto g = concept_arg(s, in);
    const Algebra& alg = g.algebra();
    std::optional<TruthValue> lambda;
    if (!s.o.lambda.empty()) lambda = parse_cli_value(s.o.lambda, alg);
    if (s.o.dry_run) return dry(s, format_formula(phi));
    auto deg = rl_degree(phi, g, pool);
    std::ostringstream txt;
    txt << "formula: " << format_formula(phi) << '\n' << "degree: " << fmt(alg, deg) << '\n';
    Json j{{"formula", format_formula(phi)}, {"degree", io::value_to_json(deg, alg)}};
    int rc = kOk;
    if (lambda) {
        bool h = eval_rl(phi, g, pool, *lambda);
        txt << "holds at " << s.o.lambda << ": " << (h ? "PASS" : "FAIL") << '\n';
        j["holds"] = h;
        rc = h ? kOk : kFails;
    }
    emit(s, j, txt.str());
    return rc;
}

int integrate_cmd(const Session& s) {
    if (s.o.signsystems.size() != s.o.models.size() || s.o.signsystems.empty())
        throw InputError("integrate needs matching --signsystem and --model lists");
    std::vector<Semiotic> parts;
    for (std::size_t i = 0; i < s.o.signsystems.size(); ++i) parts.push_back(s.semiotic(s.o.signsystems[i], s.o.models[i]));
    if (s.o.dry_run) return dry(s, std::to_string(parts.size()) + " semiotics");
    auto merged = integrate(parts);
    auto r = validate_model(merged, {s.o.strict, s.eval()});
    std::ostringstream txt;
    txt << "algebra: " << merged.model.algebra.name() << '\n';
    txt << "signs:";
    for (const auto& [name, _] : merged.model.signs) txt << ' ' << name;
    txt << "\ncomponents:";
    for (const auto& [name, _] : merged.model.components) txt << ' ' << name;
    txt << '\n';
    for (const auto* c : r.failures()) txt << c->kind << ' ' << c->subject << ": FAIL (" << c->detail << ")\n";
    txt << "model: " << (r.ok() ? "valid" : "invalid") << '\n';
    Json signs = Json::array(), comps = Json::array();
    for (const auto& [name, _] : merged.model.signs) signs.push_back(name);
    for (const auto& [name, _] : merged.model.components) comps.push_back(name);
    emit(s,
         {{"algebra", io::algebra_to_json(merged.model.algebra)},
          {"signs", signs},
          {"components", comps},
          {"valid", r.ok()}},
         txt.str());
    return r.ok() ? kOk : kFails;
}

int export_cmd(const Session& s) {
    auto d = s.doc("diagram", s.o.diagram);
    if (s.o.format == "string") {
        auto cfg = io::parse_configuration(d);
        if (s.o.dry_run) return dry(s, cfg.name);
        auto text = encode_string(cfg);
        emit(s, {{"name", cfg.name}, {"string", text}}, text + "\n");
        return kOk;
    }
    if (s.o.format == "json") {
        if (d.json.contains("algebra")) {
            auto md = io::parse_diagram(d);
            if (s.o.dry_run) return dry(s, "diagram");
            Json j = Json::object();
            j["limit"] = io::relation_to_json(limit(md, s.eval()));
            s.out << j.dump(2) << '\n';
            return kOk;
        }
        auto cfg = io::parse_configuration(d);
        if (s.o.dry_run) return dry(s, cfg.name);
        s.out << io::configuration_to_json(cfg).dump(2) << '\n';
        return kOk;
    }
    throw InputError("--format is string or json");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Many-valued sketches: algebras, Omega-sets, diagrams, semiotics and consistency"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--workspace", o.workspace, "workspace manifest (default: $OMEGASKETCH_WORKSPACE)");
    app.add_flag("--json", o.json, "machine-readable output");
    app.add_flag("--dry-run", o.dry_run, "resolve references without evaluating");
    app.add_option("--max-cells", o.max_cells, "cell-count guard for tensors");

    auto common = [&](CLI::App* sub) {
        sub->add_option("--workspace", o.workspace);
        sub->add_flag("--json", o.json);
        sub->add_flag("--dry-run", o.dry_run);
        sub->add_option("--max-cells", o.max_cells);
        sub->add_option("--algebra", o.algebra, "algebra name or spec file");
        return sub;
    };

    std::map<std::string, std::function<int(const Session&)>> handlers;
    auto add = [&](const std::string& name, const std::string& help, std::function<int(const Session&)> fn) {
        handlers[name] = std::move(fn);
        return common(app.add_subcommand(name, help));
    };

    auto* ca = add("check-algebra", "check the residuated-lattice laws", check_algebra);
    ca->add_option("--samples", o.samples, "random triples for infinite carriers");
    ca->add_option("--seed", o.seed);

    auto* vo = add("validate-omegaset", "check symmetry and transitivity of a similarity", validate_omegaset);
    vo->add_option("--set", o.set)->required();
    vo->add_flag("--strict", o.strict);

    auto* co = add("compose", "sup-tensor composition of two relations", compose_cmd);
    co->add_option("--left", o.left)->required();
    co->add_option("--right", o.right)->required();
    co->add_option("--out", o.out, "write the composite as JSON");
    co->add_option("--set", o.set, "Omega-set the relations refer to");

    for (auto [name, colim] : {std::pair{"limit", false}, std::pair{"colimit", true}}) {
        auto* l = add(name, std::string(name) + " of a multi-diagram",
                      [colim](const Session& s) { return limit_cmd(s, colim); });
        l->add_option("--diagram", o.diagram)->required();
        l->add_option("--signsystem", o.signsystem);
        l->add_option("--model", o.model);
        l->add_flag("--full", o.full, "table over every vertex");
    }

    auto* cm = add("commutativity", "commutativity degree of a multi-diagram", commutativity_cmd);
    cm->add_option("--diagram", o.diagram)->required();
    cm->add_option("--signsystem", o.signsystem);
    cm->add_option("--model", o.model);
    cm->add_option("--lambda", o.lambda);

    auto* by = add("bayes", "condition a relation on an observed description", bayes_cmd);
    by->add_option("--relation", o.relation)->required();
    by->add_option("--given", o.given, "name=label pairs, comma separated")->required();
    by->add_option("--target", o.target, "keep one target attribute");
    by->add_option("--chain", o.chain_with, "relation to chain the classifier through");
    by->add_option("--set", o.set);

    auto* vm = add("validate-model", "check a model against its sign system", validate_model_cmd);
    vm->add_option("--signsystem", o.signsystem)->required();
    vm->add_option("--model", o.model)->required();
    vm->add_flag("--strict", o.strict, "epi failures are errors");

    auto* ip = add("interpret", "evaluate a configuration in a model", interpret_cmd);
    ip->add_option("--signsystem", o.signsystem)->required();
    ip->add_option("--model", o.model)->required();
    ip->add_option("--diagram", o.diagram)->required();
    ip->add_flag("--colimit", o.colimit);

    auto* gl = add("glue", "glue two words or two configurations", glue_cmd);
    gl->add_option("--left", o.left)->required();
    gl->add_option("--right", o.right)->required();
    gl->add_option("--signsystem", o.signsystem, "ontology source");

    auto pool_opts = [&](CLI::App* sub) {
        sub->add_option("--pool", o.pool);
        sub->add_option("--signsystem", o.signsystem);
        sub->add_option("--model", o.model);
        sub->add_option("--lambda", o.lambda);
        return sub;
    };
    auto* cs = pool_opts(add("consistency", "lambda-consistency of a concept with a diagram", consistency_cmd));
    cs->add_option("--concept", o.concept_ref)->required();
    cs->add_option("--diagram", o.diagram)->required();
    cs->add_option("--mode", o.mode, "forall or exists");

    auto* an = pool_opts(add("answers", "lambda-answers of the pool diagrams", answers_cmd));
    an->add_option("--diagram", o.diagram, "only this diagram");

    auto* in = pool_opts(add("infer", "lambda-consequences of a set of diagrams", infer_cmd));
    in->add_option("--premises", o.premises, "comma-separated diagram names");
    in->add_option("--conclusion", o.conclusion);

    auto* rl = pool_opts(add("rl-eval", "evaluate a modal formula on a concept", rl_eval_cmd));
    rl->add_option("--formula", o.formula)->required();
    rl->add_option("--concept", o.concept_ref)->required();

    auto* ig = add("integrate", "integrate semiotics over the product algebra", integrate_cmd);
    ig->add_option("--signsystem", o.signsystems)->required();
    ig->add_option("--model", o.models)->required();
    ig->add_flag("--strict", o.strict);

    auto* ex = add("export", "emit a configuration as a string word or JSON", export_cmd);
    ex->add_option("--diagram", o.diagram)->required();
    ex->add_option("--format", o.format, "string or json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kInputError;
    }

    try {
        Session s{o, o.workspace.empty() ? io::Workspace::from_environment() : io::Workspace(o.workspace)};
        for (auto* sub : app.get_subcommands()) return handlers.at(sub->get_name())(s);
    } catch (const UnsupportedOperation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFails;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}
