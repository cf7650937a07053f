#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace osk {

inline constexpr double kEps = 1e-9;

// Truth value stored as a short list of leaf coordinates. Scalar algebras use one
// leaf; products of algebras are flattened, one leaf per scalar factor.
// Finite-chain leaves hold the element index as a double.
class TruthValue {
public:
    static constexpr std::size_t kMaxLeaves = 6;

    TruthValue() = default;
    TruthValue(double v) : size_(1) { leaves_[0] = v; }  // NOLINT: scalar promotion is intended
    TruthValue(std::initializer_list<double> vs);
    static TruthValue from_leaves(std::span<const double> vs);

    std::size_t size() const { return size_; }
    double operator[](std::size_t i) const { return leaves_[i]; }
    double& operator[](std::size_t i) { return leaves_[i]; }
    std::span<const double> leaves() const { return {leaves_.data(), size_}; }
    double scalar() const;

    friend bool operator==(const TruthValue& a, const TruthValue& b);

private:
    std::array<double, kMaxLeaves> leaves_{};
    std::uint8_t size_ = 0;
};

enum class Connective { tensor, implies, meet, join, equiv };
enum class Padding { bot, top };

const char* to_string(Connective c);
std::optional<Connective> parse_connective(const std::string& s);

struct ChainTables {
    std::vector<std::string> labels;
    std::vector<int> tensor;   // n*n, row-major, element indices
    std::vector<int> implies;  // n*n
    std::size_t size() const { return labels.size(); }
};

// Bounded commutative residuated lattice. Value type with cheap copies.
class Algebra {
public:
    enum class Kind { boolean, goedel, product_tnorm, lukasiewicz, finite_chain, product_of };

    static Algebra boolean();
    static Algebra goedel();
    static Algebra product_tnorm();
    static Algebra lukasiewicz();
    // Tables are indexed [x][y] by element position (bottom first). When `divisible`
    // is empty the flag is computed from the tables.
    static Algebra finite_chain(std::vector<std::string> labels,
                                const std::vector<std::vector<int>>& tensor,
                                const std::vector<std::vector<int>>& implies,
                                std::optional<bool> divisible = std::nullopt);
    // Finite chain {0, 1/(n-1), ..., 1} with Łukasiewicz or Gödel connectives.
    static Algebra lukasiewicz_chain(std::size_t n);
    static Algebra goedel_chain(std::size_t n);
    static Algebra product_of(std::vector<Algebra> parts);

    Kind kind() const { return kind_; }
    std::string name() const;
    bool divisible() const { return divisible_; }
    bool is_finite() const;
    std::size_t leaf_count() const { return leaves_.size(); }

    // Top-level factors of a product algebra (empty for scalar algebras).
    std::size_t arity() const { return parts_.size(); }
    const Algebra& component(std::size_t j) const;

    TruthValue bottom() const;
    TruthValue top() const;

    TruthValue eval(Connective c, const TruthValue& x, const TruthValue& y) const;
    TruthValue tensor(const TruthValue& x, const TruthValue& y) const;
    TruthValue implies(const TruthValue& x, const TruthValue& y) const;
    TruthValue meet(const TruthValue& x, const TruthValue& y) const;
    TruthValue join(const TruthValue& x, const TruthValue& y) const;
    TruthValue equiv(const TruthValue& x, const TruthValue& y) const;
    TruthValue negate(const TruthValue& x) const { return implies(x, bottom()); }

    bool leq(const TruthValue& x, const TruthValue& y) const;
    bool approx_equal(const TruthValue& x, const TruthValue& y, double eps = kEps) const;
    bool approx_leq(const TruthValue& x, const TruthValue& y, double eps = kEps) const;
    bool is_top(const TruthValue& x, double eps = kEps) const { return approx_equal(x, top(), eps); }
    bool is_bottom(const TruthValue& x, double eps = kEps) const { return approx_equal(x, bottom(), eps); }

    bool contains(const TruthValue& x) const;
    void require(const TruthValue& x) const;  // throws CarrierError

    TruthValue project(std::size_t j, const TruthValue& x) const;
    TruthValue embed(std::size_t j, const TruthValue& x, Padding pad) const;

    // Every element, for finite carriers.
    std::optional<std::vector<TruthValue>> carrier() const;
    TruthValue random_value(std::mt19937_64& rng) const;

    // Scalar from the unit interval, mapped onto finite chains by nearest element.
    TruthValue from_real(double v) const;
    double to_real(const TruthValue& x) const;  // scalar algebras only

    std::string format(const TruthValue& x) const;
    // Accepts element labels for chains; "top"/"bot" everywhere.
    std::optional<TruthValue> parse_label(const std::string& s) const;

    friend bool operator==(const Algebra& a, const Algebra& b);

private:
    struct Leaf {
        Kind kind;
        std::shared_ptr<const ChainTables> chain;
    };

    Algebra() = default;
    static Algebra scalar(Kind k, std::shared_ptr<const ChainTables> chain = nullptr);

    Kind kind_ = Kind::boolean;
    std::vector<Leaf> leaves_;
    std::vector<Algebra> parts_;
    std::vector<std::size_t> offsets_;
    bool divisible_ = true;
};

// Fold helpers with the empty-index conventions: sup of nothing is bottom, inf is top.
TruthValue join_all(const Algebra& alg, std::span<const TruthValue> xs);
TruthValue meet_all(const Algebra& alg, std::span<const TruthValue> xs);
TruthValue tensor_all(const Algebra& alg, std::span<const TruthValue> xs);

struct LawResult {
    std::string law;
    bool passed = true;
    std::size_t checked = 0;
    std::string witness;
};

struct LawReport {
    std::string algebra;
    bool exhaustive = false;
    std::vector<LawResult> laws;
    bool all_passed() const;
    const LawResult* find(const std::string& law) const;
};

// Exhaustive on finite carriers, otherwise boundary values plus `sample_budget`
// random triples.
LawReport check_laws(const Algebra& alg, std::size_t sample_budget, std::uint64_t seed = 1);

}  // namespace osk
