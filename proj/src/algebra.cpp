#include "omegasketch/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "omegasketch/errors.hpp"

namespace osk {

TruthValue::TruthValue(std::initializer_list<double> vs) {
    if (vs.size() > kMaxLeaves) throw CarrierError("truth value has too many coordinates");
    for (double v : vs) leaves_[size_++] = v;
}

TruthValue TruthValue::from_leaves(std::span<const double> vs) {
    if (vs.size() > kMaxLeaves) throw CarrierError("truth value has too many coordinates");
    TruthValue t;
    for (double v : vs) t.leaves_[t.size_++] = v;
    return t;
}

double TruthValue::scalar() const {
    if (size_ != 1) throw CarrierError("expected a scalar truth value");
    return leaves_[0];
}

bool operator==(const TruthValue& a, const TruthValue& b) {
    if (a.size_ != b.size_) return false;
    for (std::size_t i = 0; i < a.size_; ++i)
        if (a.leaves_[i] != b.leaves_[i]) return false;
    return true;
}

const char* to_string(Connective c) {
    switch (c) {
        case Connective::tensor: return "tensor";
        case Connective::implies: return "implies";
        case Connective::meet: return "meet";
        case Connective::join: return "join";
        case Connective::equiv: return "equiv";
    }
    return "?";
}

std::optional<Connective> parse_connective(const std::string& s) {
    if (s == "tensor" || s == "otimes" || s == "*" || s == "⊗") return Connective::tensor;
    if (s == "implies" || s == "->" || s == "⇒") return Connective::implies;
    if (s == "meet" || s == "and" || s == "&" || s == "∧") return Connective::meet;
    if (s == "join" || s == "or" || s == "|" || s == "∨") return Connective::join;
    if (s == "equiv" || s == "<->" || s == "⇔") return Connective::equiv;
    return std::nullopt;
}

namespace {

using Kind = Algebra::Kind;

int chain_index(double v) { return static_cast<int>(v); }

double leaf_tensor(Kind k, const ChainTables* c, double x, double y) {
    switch (k) {
        case Kind::boolean:
        case Kind::goedel: return std::min(x, y);
        case Kind::product_tnorm: return x * y;
        case Kind::lukasiewicz: return std::max(0.0, x + y - 1.0);
        case Kind::finite_chain:
            return c->tensor[static_cast<std::size_t>(chain_index(x)) * c->size() +
                             static_cast<std::size_t>(chain_index(y))];
        case Kind::product_of: break;
    }
    return 0.0;
}

double leaf_implies(Kind k, const ChainTables* c, double x, double y) {
    switch (k) {
        case Kind::boolean:
        case Kind::goedel: return x <= y ? 1.0 : y;
        case Kind::product_tnorm: return x <= y ? 1.0 : y / x;
        case Kind::lukasiewicz: return std::min(1.0, 1.0 - x + y);
        case Kind::finite_chain:
            return c->implies[static_cast<std::size_t>(chain_index(x)) * c->size() +
                              static_cast<std::size_t>(chain_index(y))];
        case Kind::product_of: break;
    }
    return 0.0;
}

double leaf_top(Kind k, const ChainTables* c) {
    return k == Kind::finite_chain ? static_cast<double>(c->size() - 1) : 1.0;
}

bool leaf_contains(Kind k, const ChainTables* c, double v) {
    switch (k) {
        case Kind::boolean: return v == 0.0 || v == 1.0;
        case Kind::finite_chain:
            return v >= 0.0 && v < static_cast<double>(c->size()) && std::floor(v) == v;
        default: return std::isfinite(v) && v >= 0.0 && v <= 1.0;
    }
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v == 0.0 ? 0.0 : v);
    return buf;
}

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::boolean: return "boolean";
        case Kind::goedel: return "goedel";
        case Kind::product_tnorm: return "product_tnorm";
        case Kind::lukasiewicz: return "lukasiewicz";
        case Kind::finite_chain: return "finite_chain";
        case Kind::product_of: return "product_of";
    }
    return "?";
}

}  // namespace

Algebra Algebra::scalar(Kind k, std::shared_ptr<const ChainTables> chain) {
    Algebra a;
    a.kind_ = k;
    a.leaves_.push_back({k, std::move(chain)});
    a.divisible_ = true;
    return a;
}

Algebra Algebra::boolean() { return scalar(Kind::boolean); }
Algebra Algebra::goedel() { return scalar(Kind::goedel); }
Algebra Algebra::product_tnorm() { return scalar(Kind::product_tnorm); }
Algebra Algebra::lukasiewicz() { return scalar(Kind::lukasiewicz); }

Algebra Algebra::finite_chain(std::vector<std::string> labels,
                              const std::vector<std::vector<int>>& tensor,
                              const std::vector<std::vector<int>>& implies,
                              std::optional<bool> divisible) {
    const std::size_t n = labels.size();
    if (n < 2) throw ShapeError("finite chain needs at least two elements");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (labels[i] == labels[j]) throw ShapeError("duplicate chain label '" + labels[i] + "'");
    auto flatten = [n](const std::vector<std::vector<int>>& t, const char* what) {
        if (t.size() != n) throw ShapeError(std::string(what) + " table has wrong row count");
        std::vector<int> flat;
        flat.reserve(n * n);
        for (const auto& row : t) {
            if (row.size() != n) throw ShapeError(std::string(what) + " table has wrong column count");
            for (int v : row) {
                if (v < 0 || static_cast<std::size_t>(v) >= n)
                    throw CarrierError(std::string(what) + " table entry outside the chain");
                flat.push_back(v);
            }
        }
        return flat;
    };
    auto tables = std::make_shared<ChainTables>();
    tables->labels = std::move(labels);
    tables->tensor = flatten(tensor, "tensor");
    tables->implies = flatten(implies, "implies");
    Algebra a = scalar(Kind::finite_chain, tables);
    if (divisible) {
        a.divisible_ = *divisible;
    } else {
        bool ok = true;
        for (std::size_t x = 0; x < n && ok; ++x)
            for (std::size_t y = 0; y < n && ok; ++y) {
                int r = tables->implies[x * n + y];
                int lhs = tables->tensor[x * n + static_cast<std::size_t>(r)];
                ok = lhs == static_cast<int>(std::min(x, y));
            }
        a.divisible_ = ok;
    }
    return a;
}

namespace {

std::vector<std::string> chain_labels(std::size_t n) {
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < n; ++k) {
        if (k == 0) labels.emplace_back("0");
        else if (k + 1 == n) labels.emplace_back("1");
        else labels.push_back(std::to_string(k) + "/" + std::to_string(n - 1));
    }
    return labels;
}

}  // namespace

Algebra Algebra::lukasiewicz_chain(std::size_t n) {
    if (n < 2) throw ShapeError("finite chain needs at least two elements");
    const int top = static_cast<int>(n) - 1;
    std::vector<std::vector<int>> t(n, std::vector<int>(n)), r(n, std::vector<int>(n));
    for (int x = 0; x <= top; ++x)
        for (int y = 0; y <= top; ++y) {
            t[x][y] = std::max(0, x + y - top);
            r[x][y] = std::min(top, top - x + y);
        }
    return finite_chain(chain_labels(n), t, r, true);
}

Algebra Algebra::goedel_chain(std::size_t n) {
    if (n < 2) throw ShapeError("finite chain needs at least two elements");
    const int top = static_cast<int>(n) - 1;
    std::vector<std::vector<int>> t(n, std::vector<int>(n)), r(n, std::vector<int>(n));
    for (int x = 0; x <= top; ++x)
        for (int y = 0; y <= top; ++y) {
            t[x][y] = std::min(x, y);
            r[x][y] = x <= y ? top : y;
        }
    return finite_chain(chain_labels(n), t, r, true);
}

Algebra Algebra::product_of(std::vector<Algebra> parts) {
    if (parts.empty()) throw ShapeError("product of algebras needs at least one factor");
    Algebra a;
    a.kind_ = Kind::product_of;
    a.divisible_ = true;
    for (const auto& p : parts) {
        a.offsets_.push_back(a.leaves_.size());
        a.leaves_.insert(a.leaves_.end(), p.leaves_.begin(), p.leaves_.end());
        a.divisible_ = a.divisible_ && p.divisible_;
    }
    if (a.leaves_.size() > TruthValue::kMaxLeaves)
        throw ShapeError("product algebra exceeds " + std::to_string(TruthValue::kMaxLeaves) + " scalar factors");
    a.offsets_.push_back(a.leaves_.size());
    a.parts_ = std::move(parts);
    return a;
}

std::string Algebra::name() const {
    if (kind_ != Kind::product_of) return kind_name(kind_);
    std::string s = "product_of(";
    for (std::size_t j = 0; j < parts_.size(); ++j) {
        if (j) s += ", ";
        s += parts_[j].name();
    }
    return s + ")";
}

bool Algebra::is_finite() const {
    return std::all_of(leaves_.begin(), leaves_.end(), [](const Leaf& l) {
        return l.kind == Kind::boolean || l.kind == Kind::finite_chain;
    });
}

const Algebra& Algebra::component(std::size_t j) const {
    if (j >= parts_.size()) throw ShapeError("component index " + std::to_string(j) + " out of range");
    return parts_[j];
}

TruthValue Algebra::bottom() const {
    std::array<double, TruthValue::kMaxLeaves> v{};
    return TruthValue::from_leaves(std::span<const double>(v.data(), leaves_.size()));
}

TruthValue Algebra::top() const {
    std::array<double, TruthValue::kMaxLeaves> v{};
    for (std::size_t i = 0; i < leaves_.size(); ++i) v[i] = leaf_top(leaves_[i].kind, leaves_[i].chain.get());
    return TruthValue::from_leaves(std::span<const double>(v.data(), leaves_.size()));
}

TruthValue Algebra::eval(Connective c, const TruthValue& x, const TruthValue& y) const {
    switch (c) {
        case Connective::tensor: return tensor(x, y);
        case Connective::implies: return implies(x, y);
        case Connective::meet: return meet(x, y);
        case Connective::join: return join(x, y);
        case Connective::equiv: return equiv(x, y);
    }
    return bottom();
}

TruthValue Algebra::tensor(const TruthValue& x, const TruthValue& y) const {
    TruthValue r = x;
    for (std::size_t i = 0; i < leaves_.size(); ++i)
        r[i] = leaf_tensor(leaves_[i].kind, leaves_[i].chain.get(), x[i], y[i]);
    return r;
}

TruthValue Algebra::implies(const TruthValue& x, const TruthValue& y) const {
    TruthValue r = x;
    for (std::size_t i = 0; i < leaves_.size(); ++i)
        r[i] = leaf_implies(leaves_[i].kind, leaves_[i].chain.get(), x[i], y[i]);
    return r;
}

TruthValue Algebra::meet(const TruthValue& x, const TruthValue& y) const {
    TruthValue r = x;
    for (std::size_t i = 0; i < leaves_.size(); ++i) r[i] = std::min(x[i], y[i]);
    return r;
}

TruthValue Algebra::join(const TruthValue& x, const TruthValue& y) const {
    TruthValue r = x;
    for (std::size_t i = 0; i < leaves_.size(); ++i) r[i] = std::max(x[i], y[i]);
    return r;
}

TruthValue Algebra::equiv(const TruthValue& x, const TruthValue& y) const {
    return tensor(implies(x, y), implies(y, x));
}

bool Algebra::leq(const TruthValue& x, const TruthValue& y) const {
    for (std::size_t i = 0; i < leaves_.size(); ++i)
        if (!(x[i] <= y[i])) return false;
    return true;
}

bool Algebra::approx_equal(const TruthValue& x, const TruthValue& y, double eps) const {
    for (std::size_t i = 0; i < leaves_.size(); ++i)
        if (std::fabs(x[i] - y[i]) > eps) return false;
    return true;
}

bool Algebra::approx_leq(const TruthValue& x, const TruthValue& y, double eps) const {
    for (std::size_t i = 0; i < leaves_.size(); ++i)
        if (x[i] > y[i] + eps) return false;
    return true;
}

bool Algebra::contains(const TruthValue& x) const {
    if (x.size() != leaves_.size()) return false;
    for (std::size_t i = 0; i < leaves_.size(); ++i)
        if (!leaf_contains(leaves_[i].kind, leaves_[i].chain.get(), x[i])) return false;
    return true;
}

void Algebra::require(const TruthValue& x) const {
    if (contains(x)) return;
    std::ostringstream os;
    os << "value (";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ") is not in the carrier of " << name();
    throw CarrierError(os.str());
}

TruthValue Algebra::project(std::size_t j, const TruthValue& x) const {
    if (kind_ != Kind::product_of) {
        if (j != 0) throw ShapeError("projection index out of range");
        return x;
    }
    if (j >= parts_.size()) throw ShapeError("projection index " + std::to_string(j) + " out of range");
    return TruthValue::from_leaves(x.leaves().subspan(offsets_[j], offsets_[j + 1] - offsets_[j]));
}

TruthValue Algebra::embed(std::size_t j, const TruthValue& x, Padding pad) const {
    if (kind_ != Kind::product_of) throw ShapeError("embedding needs a product algebra");
    if (j >= parts_.size()) throw ShapeError("embedding index " + std::to_string(j) + " out of range");
    parts_[j].require(x);
    TruthValue r = pad == Padding::top ? top() : bottom();
    for (std::size_t i = 0; i < x.size(); ++i) r[offsets_[j] + i] = x[i];
    return r;
}

std::optional<std::vector<TruthValue>> Algebra::carrier() const {
    if (!is_finite()) return std::nullopt;
    std::vector<TruthValue> out{bottom()};
    for (std::size_t i = 0; i < leaves_.size(); ++i) {
        const auto n = static_cast<std::size_t>(leaf_top(leaves_[i].kind, leaves_[i].chain.get())) + 1;
        std::vector<TruthValue> next;
        next.reserve(out.size() * n);
        for (const auto& t : out)
            for (std::size_t k = 0; k < n; ++k) {
                TruthValue u = t;
                u[i] = static_cast<double>(k);
                next.push_back(u);
            }
        out = std::move(next);
    }
    return out;
}

TruthValue Algebra::random_value(std::mt19937_64& rng) const {
    TruthValue r = bottom();
    for (std::size_t i = 0; i < leaves_.size(); ++i) {
        const auto& l = leaves_[i];
        if (l.kind == Kind::boolean || l.kind == Kind::finite_chain) {
            std::uniform_int_distribution<int> d(0, static_cast<int>(leaf_top(l.kind, l.chain.get())));
            r[i] = d(rng);
        } else {
            r[i] = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        }
    }
    return r;
}

TruthValue Algebra::from_real(double v) const {
    if (leaves_.size() != 1) throw CarrierError("real values map only onto scalar algebras");
    const auto& l = leaves_[0];
    if (l.kind == Kind::boolean) {
        if (v != 0.0 && v != 1.0) throw CarrierError("boolean values must be 0 or 1");
        return v;
    }
    if (l.kind == Kind::finite_chain) {
        if (v < 0.0 || v > 1.0) throw CarrierError("value outside [0,1]");
        return std::round(v * static_cast<double>(l.chain->size() - 1));
    }
    TruthValue t(v);
    require(t);
    return t;
}

double Algebra::to_real(const TruthValue& x) const {
    if (leaves_.size() != 1) throw CarrierError("real view needs a scalar algebra");
    if (leaves_[0].kind == Kind::finite_chain) return x[0] / static_cast<double>(leaves_[0].chain->size() - 1);
    return x[0];
}

std::string Algebra::format(const TruthValue& x) const {
    auto leaf = [&](std::size_t i) {
        const auto& l = leaves_[i];
        if (l.kind == Kind::finite_chain) {
            auto k = static_cast<std::size_t>(x[i]);
            return k < l.chain->size() ? l.chain->labels[k] : fixed6(x[i]);
        }
        return fixed6(x[i]);
    };
    if (leaves_.size() == 1 && kind_ != Kind::product_of) return leaf(0);
    std::string s = "(";
    for (std::size_t i = 0; i < leaves_.size(); ++i) {
        if (i) s += ", ";
        s += leaf(i);
    }
    return s + ")";
}

std::optional<TruthValue> Algebra::parse_label(const std::string& s) const {
    if (s == "top" || s == "⊤") return top();
    if (s == "bot" || s == "⊥") return bottom();
    if (leaves_.size() != 1) return std::nullopt;
    const auto& l = leaves_[0];
    if (l.kind == Kind::finite_chain) {
        const auto& labels = l.chain->labels;
        auto it = std::find(labels.begin(), labels.end(), s);
        if (it != labels.end()) return static_cast<double>(it - labels.begin());
        return std::nullopt;
    }
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') return std::nullopt;
    TruthValue t(v);
    if (!contains(t)) return std::nullopt;
    return t;
}

bool operator==(const Algebra& a, const Algebra& b) {
    if (a.kind_ != b.kind_ || a.leaves_.size() != b.leaves_.size()) return false;
    if (a.parts_.size() != b.parts_.size()) return false;
    for (std::size_t i = 0; i < a.leaves_.size(); ++i) {
        const auto& x = a.leaves_[i];
        const auto& y = b.leaves_[i];
        if (x.kind != y.kind) return false;
        if (x.kind == Algebra::Kind::finite_chain && x.chain != y.chain) {
            if (x.chain->labels != y.chain->labels || x.chain->tensor != y.chain->tensor ||
                x.chain->implies != y.chain->implies)
                return false;
        }
    }
    for (std::size_t j = 0; j < a.parts_.size(); ++j)
        if (!(a.parts_[j] == b.parts_[j])) return false;
    return true;
}

TruthValue join_all(const Algebra& alg, std::span<const TruthValue> xs) {
    TruthValue acc = alg.bottom();
    for (const auto& x : xs) acc = alg.join(acc, x);
    return acc;
}

TruthValue meet_all(const Algebra& alg, std::span<const TruthValue> xs) {
    TruthValue acc = alg.top();
    for (const auto& x : xs) acc = alg.meet(acc, x);
    return acc;
}

TruthValue tensor_all(const Algebra& alg, std::span<const TruthValue> xs) {
    TruthValue acc = alg.top();
    for (const auto& x : xs) acc = alg.tensor(acc, x);
    return acc;
}

bool LawReport::all_passed() const {
    return std::all_of(laws.begin(), laws.end(), [](const LawResult& l) { return l.passed; });
}

const LawResult* LawReport::find(const std::string& law) const {
    for (const auto& l : laws)
        if (l.law == law) return &l;
    return nullptr;
}

namespace {

class LawChecker {
public:
    explicit LawChecker(const Algebra& alg) : alg_(alg) {
        for (const char* name : {"commutativity", "associativity", "unit", "monotonicity", "residuation",
                                 "implication_bounds"})
            report_.laws.push_back(LawResult{name, true, 0, {}});
        if (alg.divisible()) report_.laws.push_back(LawResult{"divisibility", true, 0, {}});
        report_.algebra = alg.name();
    }

    void pair(const TruthValue& x, const TruthValue& y) {
        check(0, alg_.approx_equal(alg_.tensor(x, y), alg_.tensor(y, x)), [&] {
            return "x=" + f(x) + " y=" + f(y) + ": x*y=" + f(alg_.tensor(x, y)) + " y*x=" + f(alg_.tensor(y, x));
        });
        if (alg_.divisible()) {
            auto lhs = alg_.tensor(x, alg_.implies(x, y));
            check(6, alg_.approx_equal(lhs, alg_.meet(x, y)), [&] {
                return "x=" + f(x) + " y=" + f(y) + ": x*(x->y)=" + f(lhs) + " x^y=" + f(alg_.meet(x, y));
            });
        }
    }

    void single(const TruthValue& x) {
        check(2, alg_.approx_equal(alg_.tensor(x, alg_.top()), x),
              [&] { return "x=" + f(x) + ": x*top=" + f(alg_.tensor(x, alg_.top())); });
    }

    void triple(const TruthValue& x, const TruthValue& y, const TruthValue& z) {
        auto l = alg_.tensor(alg_.tensor(x, y), z);
        auto r = alg_.tensor(x, alg_.tensor(y, z));
        check(1, alg_.approx_equal(l, r),
              [&] { return "x=" + f(x) + " y=" + f(y) + " z=" + f(z) + ": (xy)z=" + f(l) + " x(yz)=" + f(r); });

        bool mono = !alg_.leq(y, z) || alg_.approx_leq(alg_.tensor(x, y), alg_.tensor(x, z));
        check(3, mono, [&] { return "x=" + f(x) + " y=" + f(y) + " z=" + f(z) + ": y<=z but x*y > x*z"; });

        auto xy = alg_.tensor(x, y);
        auto yz = alg_.implies(y, z);
        bool lhs = alg_.leq(xy, z);
        bool rhs = alg_.leq(x, yz);
        bool res = !((lhs && !alg_.approx_leq(x, yz)) || (rhs && !alg_.approx_leq(xy, z)));
        check(4, res, [&] {
            return "x=" + f(x) + " y=" + f(y) + " z=" + f(z) + ": x*y=" + f(xy) + " y->z=" + f(yz) +
                   (lhs ? " (x*y<=z but x>y->z)" : " (x<=y->z but x*y>z)");
        });

        auto a = alg_.tensor(x, alg_.implies(x, y));
        auto b = alg_.tensor(alg_.implies(x, y), alg_.implies(y, z));
        bool bounds = alg_.approx_leq(a, alg_.meet(x, y)) && alg_.approx_leq(b, alg_.implies(x, z));
        check(5, bounds, [&] { return "x=" + f(x) + " y=" + f(y) + " z=" + f(z); });
    }

    LawReport finish(bool exhaustive) {
        report_.exhaustive = exhaustive;
        return std::move(report_);
    }

private:
    template <class W>
    void check(std::size_t idx, bool ok, W witness) {
        auto& law = report_.laws[idx];
        ++law.checked;
        if (!ok && law.passed) {
            law.passed = false;
            law.witness = witness();
        }
    }
    std::string f(const TruthValue& t) const { return alg_.format(t); }

    const Algebra& alg_;
    LawReport report_;
};

}  // namespace

LawReport check_laws(const Algebra& alg, std::size_t sample_budget, std::uint64_t seed) {
    LawChecker checker(alg);
    if (auto elems = alg.carrier(); elems && elems->size() <= 64) {
        for (const auto& x : *elems) {
            checker.single(x);
            for (const auto& y : *elems) {
                checker.pair(x, y);
                for (const auto& z : *elems) checker.triple(x, y, z);
            }
        }
        return checker.finish(true);
    }
    std::vector<TruthValue> corners{alg.bottom(), alg.top()};
    if (alg.leaf_count() > 1) {
        for (std::size_t i = 0; i < alg.leaf_count(); ++i) {
            TruthValue t = alg.bottom();
            t[i] = alg.top()[i];
            corners.push_back(t);
        }
    }
    for (const auto& x : corners) {
        checker.single(x);
        for (const auto& y : corners) {
            checker.pair(x, y);
            for (const auto& z : corners) checker.triple(x, y, z);
        }
    }
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < sample_budget; ++k) {
        auto x = alg.random_value(rng), y = alg.random_value(rng), z = alg.random_value(rng);
        // Mix in boundary values so degenerate cases are exercised alongside interior ones.
        if (k % 16 == 1) y = corners[k % corners.size()];
        if (k % 16 == 2) z = corners[k % corners.size()];
        checker.single(x);
        checker.pair(x, y);
        checker.triple(x, y, z);
    }
    return checker.finish(false);
}

}  // namespace osk
