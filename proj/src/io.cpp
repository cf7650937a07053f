#include "omegasketch/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "omegasketch/errors.hpp"

namespace osk::io {

namespace {

[[noreturn]] void bad(const Doc& d, const std::string& msg) { throw InputError(d.origin + ": " + msg); }

const Json& need(const Doc& d, const char* key) {
    if (!d.json.is_object() || !d.json.contains(key)) bad(d, std::string("missing field '") + key + "'");
    return d.json.at(key);
}

template <class T>
T get_as(const Doc& d, const Json& j, const char* what) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception&) {
        bad(d, std::string("field '") + what + "' has the wrong type");
    }
}

std::vector<std::string> strings(const Doc& d, const char* key) {
    if (!d.json.contains(key)) return {};
    return get_as<std::vector<std::string>>(d, d.json.at(key), key);
}

// first of several accepted spellings
std::vector<std::string> strings_any(const Doc& d, std::initializer_list<const char*> keys) {
    for (const char* k : keys)
        if (d.json.contains(k)) return strings(d, k);
    return {};
}

Doc sub(const Doc& parent, const Json& j) { return deref(j, parent.dir, parent.origin); }

}  // namespace

Json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string() + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
            if (text[i] == '\n') ++line;
        throw InputError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
}

Doc deref(const Json& j, const fs::path& dir, const std::string& origin) {
    if (j.is_string()) {
        fs::path p = j.get<std::string>();
        auto ext = p.extension().string();
        if (ext == ".json") {
            auto full = p.is_absolute() ? p : dir / p;
            return {read_json(full), full.parent_path(), full.string()};
        }
    }
    return {j, dir, origin};
}

Doc load(const fs::path& path) {
    return {read_json(path), path.parent_path(), path.string()};
}

std::string fixed6(double v) {
    if (std::abs(v) < 5e-7) v = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string format_value(const TruthValue& v, const Algebra& alg) { return alg.format(v); }

// ---- algebra and values ----

namespace {

Algebra scalar_algebra(const std::string& name) {
    if (name == "boolean") return Algebra::boolean();
    if (name == "goedel" || name == "godel" || name == "min") return Algebra::goedel();
    if (name == "product") return Algebra::product_tnorm();
    if (name == "lukasiewicz") return Algebra::lukasiewicz();
    throw InputError("unknown algebra '" + name + "'");
}

std::vector<std::vector<int>> chain_table(const Json& t, const std::vector<std::string>& labels, const char* what) {
    std::vector<std::vector<int>> out;
    if (!t.is_array() || t.size() != labels.size())
        throw InputError(std::string("finite_chain ") + what + " table must have one row per element");
    for (const auto& row : t) {
        if (!row.is_array() || row.size() != labels.size())
            throw InputError(std::string("finite_chain ") + what + " table must be square");
        std::vector<int> r;
        for (const auto& c : row) {
            if (c.is_number_integer()) {
                r.push_back(c.get<int>());
            } else if (c.is_string()) {
                auto it = std::find(labels.begin(), labels.end(), c.get<std::string>());
                if (it == labels.end()) throw InputError("finite_chain table names unknown element " + c.dump());
                r.push_back(static_cast<int>(it - labels.begin()));
            } else {
                throw InputError("finite_chain table entries are element labels or indices");
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

Algebra parse_algebra(const Json& j0) {
    const Json& j = j0.is_object() && j0.contains("algebra") ? j0.at("algebra") : j0;
    if (j.is_string()) return scalar_algebra(j.get<std::string>());
    if (!j.is_object() || j.size() != 1) throw InputError("algebra spec must be a name or a one-key object");
    const auto& [key, body] = *j.items().begin();
    if (key == "finite_chain") {
        auto labels = body.at("elements").get<std::vector<std::string>>();
        std::optional<bool> divisible;
        if (body.contains("divisible")) divisible = body.at("divisible").get<bool>();
        return Algebra::finite_chain(labels, chain_table(body.at("tensor"), labels, "tensor"),
                                     chain_table(body.at("implies"), labels, "implies"), divisible);
    }
    if (key == "lukasiewicz_chain") return Algebra::lukasiewicz_chain(body.get<std::size_t>());
    if (key == "goedel_chain") return Algebra::goedel_chain(body.get<std::size_t>());
    if (key == "product_of") {
        std::vector<Algebra> parts;
        for (const auto& p : body) parts.push_back(parse_algebra(p));
        return Algebra::product_of(std::move(parts));
    }
    throw InputError("unknown algebra form '" + key + "'");
}

Json algebra_to_json(const Algebra& alg) {
    switch (alg.kind()) {
        case Algebra::Kind::boolean: return "boolean";
        case Algebra::Kind::goedel: return "goedel";
        case Algebra::Kind::product_tnorm: return "product";
        case Algebra::Kind::lukasiewicz: return "lukasiewicz";
        case Algebra::Kind::product_of: {
            Json parts = Json::array();
            for (std::size_t j = 0; j < alg.arity(); ++j) parts.push_back(algebra_to_json(alg.component(j)));
            return Json{{"product_of", parts}};
        }
        case Algebra::Kind::finite_chain: {
            auto carrier = *alg.carrier();
            Json labels = Json::array(), tensor = Json::array(), implies = Json::array();
            for (const auto& x : carrier) labels.push_back(alg.format(x));
            for (const auto& x : carrier) {
                Json tr = Json::array(), ir = Json::array();
                for (const auto& y : carrier) {
                    tr.push_back(alg.format(alg.tensor(x, y)));
                    ir.push_back(alg.format(alg.implies(x, y)));
                }
                tensor.push_back(tr);
                implies.push_back(ir);
            }
            return Json{{"finite_chain", {{"elements", labels}, {"tensor", tensor}, {"implies", implies}}}};
        }
    }
    return nullptr;
}

TruthValue parse_value(const Json& j, const Algebra& alg) {
    if (j.is_array()) {
        if (alg.kind() != Algebra::Kind::product_of || j.size() != alg.arity())
            throw InputError("value " + j.dump() + " does not match " + alg.name());
        std::vector<double> leaves;
        for (std::size_t k = 0; k < j.size(); ++k) {
            auto v = parse_value(j[k], alg.component(k));
            leaves.insert(leaves.end(), v.leaves().begin(), v.leaves().end());
        }
        return TruthValue::from_leaves(leaves);
    }
    if (j.is_string()) {
        auto v = alg.parse_label(j.get<std::string>());
        if (!v) throw InputError("'" + j.get<std::string>() + "' is not a value of " + alg.name());
        return *v;
    }
    if (j.is_number()) {
        double x = j.get<double>();
        if (alg.kind() == Algebra::Kind::finite_chain) {
            auto v = alg.from_real(x);
            if (std::abs(alg.to_real(v) - x) > 1e-9) throw InputError(j.dump() + " is not an element of " + alg.name());
            return v;
        }
        TruthValue v(x);
        try {
            alg.require(v);
        } catch (const CarrierError&) {
            throw InputError(j.dump() + " is not a value of " + alg.name());
        }
        return v;
    }
    throw InputError("cannot read a truth value from " + j.dump());
}

Json value_to_json(const TruthValue& v, const Algebra& alg) {
    if (alg.kind() == Algebra::Kind::product_of) {
        Json out = Json::array();
        std::size_t at = 0;
        for (std::size_t k = 0; k < alg.arity(); ++k) {
            const auto& c = alg.component(k);
            std::vector<double> leaves(v.leaves().begin() + static_cast<std::ptrdiff_t>(at),
                                       v.leaves().begin() + static_cast<std::ptrdiff_t>(at + c.leaf_count()));
            at += c.leaf_count();
            out.push_back(value_to_json(TruthValue::from_leaves(leaves), c));
        }
        return out;
    }
    if (alg.kind() == Algebra::Kind::finite_chain) return alg.format(v);
    return std::stod(fixed6(v.scalar()));
}

// ---- expressions ----

namespace {

class Expr {
public:
    Expr(const std::string& s, const std::map<std::string, double>& vars) : s_(s), vars_(vars) {}

    double run() {
        double v = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& m) const {
        throw InputError("expression '" + s_ + "': " + m + " at offset " + std::to_string(pos_));
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    double sum() {
        double v = term();
        for (;;) {
            if (eat('+')) v += term();
            else if (eat('-')) v -= term();
            else return v;
        }
    }
    double term() {
        double v = unary();
        for (;;) {
            if (eat('*')) v *= unary();
            else if (eat('/')) v /= unary();
            else return v;
        }
    }
    // -x^2 is -(x^2)
    double unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }
    double power() {
        double b = atom();
        if (eat('^')) return std::pow(b, unary());
        return b;
    }
    double atom() {
        skip();
        if (eat('(')) {
            double v = sum();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            pos_ += static_cast<std::size_t>(end - begin);
            return v;
        }
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        if (start == pos_) fail("expected a value");
        std::string id = s_.substr(start, pos_ - start);
        static const std::map<std::string, double (*)(double)> unary_fns{
            {"exp", [](double x) { return std::exp(x); }},   {"log", [](double x) { return std::log(x); }},
            {"sqrt", [](double x) { return std::sqrt(x); }}, {"abs", [](double x) { return std::abs(x); }}};
        if (auto it = unary_fns.find(id); it != unary_fns.end()) {
            if (!eat('(')) fail("expected '(' after " + id);
            double v = it->second(sum());
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        if (id == "min" || id == "max") {
            if (!eat('(')) fail("expected '(' after " + id);
            double a = sum();
            if (!eat(',')) fail("expected ','");
            double b = sum();
            if (!eat(')')) fail("expected ')'");
            return id == "min" ? std::min(a, b) : std::max(a, b);
        }
        auto it = vars_.find(id);
        if (it == vars_.end()) fail("unknown name '" + id + "'");
        return it->second;
    }

    const std::string& s_;
    const std::map<std::string, double>& vars_;
    std::size_t pos_ = 0;
};

double label_number(const std::string& label) {
    char* end = nullptr;
    double v = std::strtod(label.c_str(), &end);
    if (end == label.c_str() || *end != '\0') throw InputError("label '" + label + "' is not numeric");
    return v;
}

// Clamp into [0,1] absorbing rounding noise, then map onto the algebra.
TruthValue real_value(double x, const Algebra& alg) {
    if (x < 0.0 && x > -1e-12) x = 0.0;
    if (x > 1.0 && x < 1.0 + 1e-12) x = 1.0;
    return alg.from_real(x);
}

}  // namespace

double eval_expression(const std::string& expr, const std::map<std::string, double>& vars) {
    return Expr(expr, vars).run();
}

// ---- Omega-sets ----

namespace {

std::vector<std::string> parse_support(const Doc& d, const Json& s) {
    if (s.is_array()) return get_as<std::vector<std::string>>(d, s, "support");
    if (s.is_object() && s.contains("range")) {
        auto r = get_as<std::vector<double>>(d, s.at("range"), "range");
        if (r.size() != 3 || r[2] <= 0) bad(d, "range needs [low, high, step] with a positive step");
        int decimals = s.contains("decimals") ? s.at("decimals").get<int>() : 1;
        auto n = static_cast<long>(std::floor((r[1] - r[0]) / r[2] + 1e-9));
        std::vector<std::string> out;
        for (long i = 0; i <= n; ++i) {
            char buf[64];
            double v = r[0] + static_cast<double>(i) * r[2];
            if (std::abs(v) < 1e-12) v = 0.0;
            std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
            out.push_back(buf);
        }
        return out;
    }
    bad(d, "support must be a list of labels or {\"range\": [low, high, step]}");
}

}  // namespace

OmegaSet parse_omega_set(const Doc& d, const Algebra& alg, const std::string& fallback_name) {
    std::string name = d.json.contains("name") ? d.json.at("name").get<std::string>() : fallback_name;
    auto support = parse_support(d, need(d, "support"));
    const std::size_t n = support.size();
    std::vector<TruthValue> sim(n * n, alg.bottom());
    if (d.json.contains("similarity")) {
        const auto& rows = d.json.at("similarity");
        if (rows.is_string() && rows.get<std::string>() == "crisp") {
            for (std::size_t i = 0; i < n; ++i) sim[i * n + i] = alg.top();
        } else if (rows.is_string()) {
            // expression in x and y over numeric labels
            auto expr = rows.get<std::string>();
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    sim[i * n + j] = real_value(
                        eval_expression(expr, {{"x", label_number(support[i])}, {"y", label_number(support[j])}}), alg);
        } else {
            if (!rows.is_array() || rows.size() != n) bad(d, "similarity needs " + std::to_string(n) + " rows");
            for (std::size_t i = 0; i < n; ++i) {
                if (!rows[i].is_array() || rows[i].size() != n)
                    bad(d, "similarity row " + std::to_string(i) + " needs " + std::to_string(n) + " entries");
                for (std::size_t j = 0; j < n; ++j) {
                    try {
                        sim[i * n + j] = parse_value(rows[i][j], alg);
                    } catch (const InputError& e) {
                        bad(d, "similarity[" + std::to_string(i) + "][" + std::to_string(j) + "]: " + e.what());
                    }
                }
            }
        }
    } else if (d.json.contains("extent")) {
        // diagonal similarity from an expression in the label value
        auto expr = d.json.at("extent").get<std::string>();
        std::string var = d.json.value("variable", "x");
        for (std::size_t i = 0; i < n; ++i)
            sim[i * n + i] = real_value(eval_expression(expr, {{var, label_number(support[i])}}), alg);
    } else {
        for (std::size_t i = 0; i < n; ++i) sim[i * n + i] = alg.top();
    }
    try {
        return OmegaSet(name, support, std::move(sim), alg);
    } catch (const Error& e) {
        bad(d, e.what());
    }
}

OmegaSet read_omega_set_csv(const fs::path& path, const Algebra& alg, const std::string& name) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string() + ": cannot open file");
    auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            auto b = cell.find_first_not_of(" \t\r");
            auto e = cell.find_last_not_of(" \t\r");
            out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
        }
        return out;
    };
    std::string line;
    if (!std::getline(in, line)) throw InputError(path.string() + ": empty file");
    auto support = split(line);
    const std::size_t n = support.size();
    std::vector<TruthValue> sim;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = split(line);
        if (cells.size() != n)
            throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(n) + " values");
        for (const auto& c : cells) {
            auto v = alg.parse_label(c);
            if (!v) throw InputError(path.string() + ":" + std::to_string(lineno) + ": '" + c + "' is not a truth value");
            sim.push_back(*v);
        }
    }
    if (sim.size() != n * n) throw InputError(path.string() + ": expected " + std::to_string(n) + " similarity rows");
    try {
        return OmegaSet(name.empty() ? path.stem().string() : name, support, std::move(sim), alg);
    } catch (const Error& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

OmegaSet load_omega_set(const Json& ref, const fs::path& dir, const Algebra& alg, const std::string& name) {
    if (ref.is_string()) {
        fs::path p = ref.get<std::string>();
        if (p.extension() == ".csv") return read_omega_set_csv(p.is_absolute() ? p : dir / p, alg, name);
    }
    return parse_omega_set(deref(ref, dir), alg, name);
}

Json omega_set_to_json(const OmegaSet& w) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < w.size(); ++i) {
        Json r = Json::array();
        for (std::size_t j = 0; j < w.size(); ++j) r.push_back(value_to_json(w.sim(i, j), w.algebra()));
        rows.push_back(r);
    }
    return Json{{"name", w.name()}, {"support", w.support()}, {"similarity", rows}};
}

// ---- relations ----

namespace {

SetRegistry local_sets(const Doc& d, const Algebra& alg, const SetRegistry& outer) {
    SetRegistry sets = outer;
    if (d.json.contains("sets"))
        for (const auto& [name, ref] : d.json.at("sets").items())
            sets.insert_or_assign(name, load_omega_set(ref, d.dir, alg, name));
    return sets;
}

}  // namespace

MultiMorphism parse_relation(const Doc& d, const Algebra& alg, const SetRegistry& outer) {
    auto sets = local_sets(d, alg, outer);
    std::string name = d.json.value("name", "");
    std::vector<Attribute> attrs;
    for (const auto& a : need(d, "attributes")) {
        if (!a.contains("name") || !a.contains("set")) bad(d, "attributes need 'name' and 'set'");
        const auto& s = a.at("set");
        if (s.is_string() && !sets.count(s.get<std::string>()) && fs::path(s.get<std::string>()).has_extension()) {
            attrs.push_back({a.at("name").get<std::string>(), load_omega_set(s, d.dir, alg, "")});
        } else if (s.is_string()) {
            auto it = sets.find(s.get<std::string>());
            if (it == sets.end()) bad(d, "unknown set '" + s.get<std::string>() + "'");
            attrs.push_back({a.at("name").get<std::string>(), it->second});
        } else {
            attrs.push_back({a.at("name").get<std::string>(), parse_omega_set(sub(d, s), alg)});
        }
    }
    auto sources = strings_any(d, {"source", "sources"});
    auto targets = strings_any(d, {"target", "targets"});
    TruthValue def = d.json.contains("default") ? parse_value(d.json.at("default"), alg) : alg.bottom();
    try {
        auto m = MultiMorphism::constant(name, attrs, sources, targets, def, alg);
        if (d.json.contains("values")) {
            const auto& vs = d.json.at("values");
            if (!vs.is_array() || vs.size() != m.cell_count())
                bad(d, "'values' needs " + std::to_string(m.cell_count()) + " entries");
            for (std::size_t i = 0; i < vs.size(); ++i) m.set(m.unflatten(i), parse_value(vs[i], alg));
        }
        if (d.json.contains("expression")) {
            auto expr = d.json.at("expression").get<std::string>();
            for (std::size_t i = 0; i < m.cell_count(); ++i) {
                auto idx = m.unflatten(i);
                std::map<std::string, double> vars;
                for (std::size_t k = 0; k < idx.size(); ++k)
                    vars[attrs[k].name] = label_number(attrs[k].set.label(idx[k]));
                m.set(idx, real_value(eval_expression(expr, vars), alg));
            }
        }
        if (d.json.contains("rows")) {
            for (const auto& row : d.json.at("rows")) {
                auto at = get_as<std::vector<std::string>>(d, row.at("at"), "at");
                if (at.size() != attrs.size())
                    bad(d, "row " + row.dump() + " needs " + std::to_string(attrs.size()) + " labels");
                std::vector<std::size_t> idx;
                for (std::size_t k = 0; k < at.size(); ++k) idx.push_back(attrs[k].set.index_of(at[k]));
                m.set(idx, parse_value(row.at("value"), alg));
            }
        }
        return m;
    } catch (const InputError&) {
        throw;
    } catch (const Error& e) {
        bad(d, e.what());
    }
}

Json relation_to_json(const MultiMorphism& m) {
    Json attrs = Json::array(), sets = Json::object(), rows = Json::array();
    for (const auto& a : m.attributes()) {
        auto set_name = a.set.name().empty() ? a.name : a.set.name();
        if (sets.contains(set_name) && sets.at(set_name) != omega_set_to_json(a.set)) set_name = a.name;
        sets[set_name] = omega_set_to_json(a.set);
        attrs.push_back({{"name", a.name}, {"set", set_name}});
    }
    for (std::size_t i = 0; i < m.cell_count(); ++i) {
        auto idx = m.unflatten(i);
        Json at = Json::array();
        for (std::size_t k = 0; k < idx.size(); ++k) at.push_back(m.attributes()[k].set.label(idx[k]));
        rows.push_back({{"at", at}, {"value", value_to_json(m.value(i), m.algebra())}});
    }
    return Json{{"name", m.name()},         {"algebra", algebra_to_json(m.algebra())},
                {"sets", sets},             {"attributes", attrs},
                {"source", m.sources()},    {"target", m.targets()},
                {"rows", rows}};
}

// ---- configurations and diagrams ----

namespace {

MultiGraph parse_graph(const Doc& d, const char* vertex_key, const char* arrow_key) {
    MultiGraph g;
    for (const auto& v : need(d, "vertices")) {
        if (!v.contains("id") || !v.contains(vertex_key)) bad(d, std::string("vertices need 'id' and '") + vertex_key + "'");
        g.vertices.push_back({v.at("id").get<std::string>(), v.at(vertex_key).get<std::string>()});
    }
    if (d.json.contains("arrows"))
        for (const auto& a : d.json.at("arrows")) {
            std::string label;
            if (a.contains(arrow_key)) label = a.at(arrow_key).get<std::string>();
            else if (a.contains("label")) label = a.at("label").get<std::string>();
            else bad(d, std::string("arrows need '") + arrow_key + "'");
            g.arrows.push_back({a.value("id", label), label, a.value("sources", std::vector<std::string>{}),
                                a.value("targets", std::vector<std::string>{})});
        }
    try {
        g.validate();
    } catch (const Error& e) {
        bad(d, e.what());
    }
    return g;
}

}  // namespace

Configuration parse_configuration(const Doc& d) {
    Configuration c;
    c.name = d.json.value("name", fs::path(d.origin).stem().string());
    c.graph = parse_graph(d, "sign", "component");
    c.sources = strings(d, "sources");
    c.targets = strings(d, "targets");
    return c;
}

Json configuration_to_json(const Configuration& c) {
    Json vs = Json::array(), as = Json::array();
    for (const auto& v : c.graph.vertices) vs.push_back({{"id", v.id}, {"sign", v.sign}});
    for (const auto& a : c.graph.arrows)
        as.push_back({{"id", a.id}, {"component", a.label}, {"sources", a.sources}, {"targets", a.targets}});
    Json out{{"name", c.name}, {"vertices", vs}, {"arrows", as}};
    if (!c.sources.empty()) out["sources"] = c.sources;
    if (!c.targets.empty()) out["targets"] = c.targets;
    return out;
}

MultiDiagram parse_diagram(const Doc& d) {
    Algebra alg = parse_algebra(need(d, "algebra"));
    auto sets = local_sets(d, alg, {});
    std::map<std::string, MultiMorphism> rels;
    if (d.json.contains("relations"))
        for (const auto& [name, ref] : d.json.at("relations").items()) {
            auto r = parse_relation(sub(d, ref), alg, sets);
            rels.insert_or_assign(name, r.name().empty() ? r.renamed(name) : r);
        }
    MultiDiagram md;
    md.graph = parse_graph(d, "set", "relation");
    for (const auto& v : md.graph.vertices) {
        auto it = sets.find(v.sign);
        if (it == sets.end()) bad(d, "vertex '" + v.id + "' names unknown set '" + v.sign + "'");
        md.vertex_sets.emplace(v.id, it->second);
    }
    for (const auto& a : md.graph.arrows) {
        auto it = rels.find(a.label);
        if (it == rels.end()) bad(d, "arrow '" + a.id + "' names unknown relation '" + a.label + "'");
        md.arrow_maps.emplace(a.id, it->second);
    }
    md.sources = strings(d, "sources");
    md.targets = strings(d, "targets");
    try {
        md.validate();
    } catch (const Error& e) {
        bad(d, e.what());
    }
    return md;
}

// ---- libraries, sign systems, models ----

Library parse_library(const Doc& d) {
    Library lib;
    std::vector<std::string> inputs;
    std::vector<std::pair<std::string, std::string>> order;
    if (d.json.contains("signs")) {
        Doc s = sub(d, d.json.at("signs"));
        inputs = strings(s, "inputs");
        if (s.json.contains("order"))
            for (const auto& p : s.json.at("order")) {
                auto pr = get_as<std::vector<std::string>>(d, p, "order");
                if (pr.size() != 2) bad(d, "order pairs have two signs");
                order.emplace_back(pr[0], pr[1]);
            }
    }
    try {
        lib.ontology = Ontology(inputs, order);
    } catch (const Error& e) {
        bad(d, e.what());
    }
    if (d.json.contains("components"))
        for (const auto& [label, word] : d.json.at("components").items()) {
            lib.components[label] = parse_word(word.get<std::string>());
            for (const auto& s : lib.components[label]) lib.ontology.add(Ontology::is_output(s) ? Ontology::dual(s) : s);
        }
    auto pairs = [&](const char* key) {
        std::vector<std::pair<std::string, std::string>> out;
        if (d.json.contains(key))
            for (const auto& p : d.json.at(key)) {
                auto pr = get_as<std::vector<std::string>>(d, p, key);
                if (pr.size() != 2) bad(d, std::string("'") + key + "' entries are pairs");
                out.emplace_back(pr[0], pr[1]);
            }
        return out;
    };
    lib.equiv_labels = pairs("equiv_labels");
    for (const auto& [a, b] : pairs("equiv_words")) lib.equiv_words.emplace_back(parse_word(a), parse_word(b));
    lib.auxiliary = pairs("auxiliary");
    for (const auto& [aux, principal] : lib.auxiliary) {
        lib.ontology.add(aux);
        lib.ontology.add(principal);
    }
    return lib;
}

SignSystem parse_sign_system(const Doc& d) {
    SignSystem sys;
    sys.library = parse_library(sub(d, need(d, "library")));
    sys.omega_sign = d.json.value("omega_sign", sys.omega_sign);
    sys.max_arity = d.json.value("max_arity", sys.max_arity);
    sys.library.ontology.add(sys.omega_sign);
    if (d.json.contains("E"))
        for (const auto& e : d.json.at("E")) sys.E.push_back(parse_configuration(sub(d, e)));
    auto constraints = [&](const char* key) {
        std::vector<Constraint> out;
        if (!d.json.contains(key)) return out;
        for (const auto& c : d.json.at(key)) {
            Doc cd = sub(d, c);
            out.push_back({need(cd, "component").get<std::string>(), parse_configuration(sub(cd, need(cd, "diagram"))),
                           strings(cd, "inputs"), strings(cd, "outputs")});
        }
        return out;
    };
    sys.U = constraints("U");
    sys.coU = constraints("coU");
    return sys;
}

Model parse_model(const Doc& d, const SignSystem& sys) {
    Model m;
    m.algebra = parse_algebra(need(d, "algebra"));
    const Algebra& alg = m.algebra;
    if (d.json.contains("signs"))
        for (const auto& [sign, ref] : d.json.at("signs").items())
            m.signs.insert_or_assign(sign, load_omega_set(ref, d.dir, alg, sign).renamed(sign));
    if (d.json.contains("omega_grid"))
        for (const auto& v : d.json.at("omega_grid")) m.omega_grid.push_back(parse_value(v, alg));
    if (d.json.contains("components"))
        for (const auto& [label, ref] : d.json.at("components").items()) {
            Doc cd = sub(d, ref);
            std::optional<Word> word;
            if (sys.library.has(label)) word = sys.library.word(label);
            if (cd.json.contains("constant")) {
                // similarity row of the named element
                if (!word || word->size() != 1 || !Ontology::is_output(word->front()))
                    bad(cd, "constant '" + label + "' needs a word with a single output sign");
                auto sign = Ontology::dual(word->front());
                auto it = m.signs.find(sign);
                if (it == m.signs.end()) bad(cd, "constant '" + label + "': sign '" + sign + "' has no set");
                const auto& w = it->second;
                auto e = w.index_of(cd.json.at("constant").get<std::string>());
                auto map = MultiMorphism::tabulate(label, {{"out0", w}}, {}, {"out0"}, alg,
                                                   [&](std::span<const std::size_t> idx) { return w.sim(idx[0], e); });
                m.components.insert_or_assign(label, Interpretation{map, false});
                continue;
            }
            auto rel = parse_relation(cd, alg, m.signs);
            if (rel.name().empty()) rel = rel.renamed(label);
            bool omega_valued = false;
            if (cd.json.contains("omega_valued")) {
                omega_valued = cd.json.at("omega_valued").get<bool>();
            } else if (word) {
                auto io = word_io(*word);
                omega_valued = rel.targets().empty() && io.outputs.size() == 1 &&
                               Ontology::dual(io.outputs[0]) == sys.omega_sign;
            }
            m.components.insert_or_assign(label, Interpretation{rel, omega_valued});
        }
    return m;
}

Semiotic load_semiotic(const Doc& signsystem, const Doc& model) {
    Semiotic s;
    s.system = parse_sign_system(signsystem);
    s.model = parse_model(model, s.system);
    return s;
}

// ---- pools and concepts ----

MultiMorphism parse_concept(const Doc& d, const Algebra* alg, const SetRegistry* sets) {
    std::optional<Algebra> own;
    if (d.json.contains("algebra")) own = parse_algebra(d.json.at("algebra"));
    if (!own && !alg) bad(d, "concept needs an algebra");
    SetRegistry none;
    return parse_relation(d, own ? *own : *alg, sets ? *sets : none).with_designation({}, {});
}

Pool parse_pool(const Doc& d) {
    std::optional<Semiotic> sem;
    if (d.json.contains("signsystem") || d.json.contains("model"))
        sem = load_semiotic(sub(d, need(d, "signsystem")), sub(d, need(d, "model")));
    Algebra alg = d.json.contains("algebra") ? parse_algebra(d.json.at("algebra"))
                  : sem                      ? sem->model.algebra
                                             : (bad(d, "pool needs an algebra or a semiotic"), Algebra::boolean());
    SetRegistry sets = sem ? sem->model.signs : SetRegistry{};
    sets = local_sets(d, alg, sets);
    Pool pool;
    if (d.json.contains("concepts"))
        for (const auto& c : d.json.at("concepts")) pool.concepts.push_back(parse_concept(sub(d, c), &alg, &sets));
    if (d.json.contains("diagrams"))
        for (const auto& e : d.json.at("diagrams")) {
            Doc ed = sub(d, e);
            std::string name = ed.json.value("name", "");
            if (ed.json.contains("relation")) {
                auto r = parse_relation(sub(ed, ed.json.at("relation")), alg, sets).with_designation({}, {});
                pool.diagrams.push_back({name.empty() ? r.name() : name, r});
            } else {
                if (!sem) bad(ed, "diagram entries need a semiotic ('signsystem' and 'model') to evaluate");
                auto cfg = parse_configuration(sub(ed, need(ed, "diagram")));
                pool.diagrams.push_back({name.empty() ? cfg.name : name, relation_map(*sem, cfg).with_designation({}, {})});
            }
        }
    try {
        pool.validate();
    } catch (const Error& e) {
        bad(d, e.what());
    }
    return pool;
}

// ---- workspace ----

Workspace::Workspace(const fs::path& manifest) : dir_(manifest.parent_path()) {
    auto j = read_json(manifest);
    if (!j.is_object()) throw InputError(manifest.string() + ": manifest must be an object");
    for (const auto& [kind, entries] : j.items()) {
        if (!entries.is_object()) continue;
        for (const auto& [name, ref] : entries.items()) {
            auto& slot = entries_[kind];
            if (slot.count(name)) throw InputError(manifest.string() + ": duplicate " + kind + " '" + name + "'");
            slot.emplace(name, ref);
        }
    }
}

Workspace Workspace::from_environment() {
    if (const char* p = std::getenv("OMEGASKETCH_WORKSPACE"); p && *p) return Workspace(p);
    return {};
}

Doc Workspace::resolve(const std::string& kind, const std::string& arg) const {
    if (auto k = entries_.find(kind); k != entries_.end())
        if (auto e = k->second.find(arg); e != k->second.end()) return deref(e->second, dir_, arg);
    fs::path p = arg;
    if (!fs::exists(p)) throw InputError("no " + kind + " named '" + arg + "' and no such file");
    if (p.extension() != ".json") return {Json(arg), p.parent_path(), arg};
    return load(p);
}

std::vector<std::string> Workspace::names(const std::string& kind) const {
    std::vector<std::string> out;
    if (auto k = entries_.find(kind); k != entries_.end())
        for (const auto& [n, _] : k->second) out.push_back(n);
    return out;
}

}  // namespace osk::io
