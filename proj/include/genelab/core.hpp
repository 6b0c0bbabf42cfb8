#pragma once

/// @file core.hpp
/// Domains, genotypes, populations, extended fitness and the memoizing
/// fitness database, plus the seeded randomness contract.

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace genelab {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct wrong_representation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct rejection_budget_exhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Signals that a population contains no genotype satisfying Q; the
/// optimization problem must be reformulated.
struct no_valid_genotype : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct objective_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct size_mismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Gene domains
// ---------------------------------------------------------------------------

enum class representation { binary, floating_point, integer, permutation };

inline const char* to_string(representation r) {
    switch (r) {
    case representation::binary: return "binary";
    case representation::floating_point: return "floating-point";
    case representation::integer: return "integer";
    case representation::permutation: return "permutation";
    }
    return "?";
}

/// Gene value types used by the library. Binary genes are stored as 0/1
/// integers; booleans map onto them.
template <typename T>
concept gene_value = std::same_as<T, double> || std::same_as<T, std::int64_t>;

/// Closed interval [lo, hi]; both endpoints finite (bounded gene set).
template <gene_value T>
struct interval {
    T lo;
    T hi;

    bool contains(T v) const { return lo <= v && v <= hi; }
    T width() const { return hi - lo; }
};

/// Ordered list of gene intervals plus the constraint predicate Q.
/// The feasible set G is the subset of the gene box where Q holds; for
/// permutation domains Q always includes the all-distinct condition.
template <gene_value T>
class genotype_domain {
public:
    using predicate = std::function<bool(std::span<const T>)>;

    genotype_domain(representation repr, std::vector<interval<T>> genes,
                    predicate q = {})
        : repr_(repr), genes_(std::move(genes)), q_(std::move(q)) {
        if (genes_.empty())
            throw std::invalid_argument("genotype_domain: length must be >= 1");
        if constexpr (std::same_as<T, double>) {
            if (repr_ != representation::floating_point)
                throw wrong_representation(
                    "genotype_domain: real genes require floating-point representation");
        } else {
            if (repr_ == representation::floating_point)
                throw wrong_representation(
                    "genotype_domain: floating-point representation requires real genes");
        }
        for (const auto& iv : genes_) {
            if (!(iv.lo <= iv.hi) || !bounded(iv.lo) || !bounded(iv.hi))
                throw std::invalid_argument(
                    "genotype_domain: gene interval must be bounded with lo <= hi");
        }
        if (repr_ == representation::permutation) {
            const auto c = static_cast<T>(genes_.size() - 1);
            for (const auto& iv : genes_)
                if (iv.lo != T{0} || iv.hi != c)
                    throw std::invalid_argument(
                        "genotype_domain: permutation slots must span [0, c-1]");
        }
        if (repr_ == representation::binary) {
            for (const auto& iv : genes_)
                if (iv.lo != T{0} || iv.hi != T{1})
                    throw std::invalid_argument(
                        "genotype_domain: binary genes must span {0, 1}");
        }
    }

    representation repr() const { return repr_; }
    std::size_t size() const { return genes_.size(); }
    const interval<T>& gene(std::size_t i) const { return genes_[i]; }
    std::span<const interval<T>> genes() const { return genes_; }

    bool in_box(std::span<const T> values) const {
        if (values.size() != genes_.size()) return false;
        for (std::size_t i = 0; i < values.size(); ++i)
            if (!genes_[i].contains(values[i])) return false;
        return true;
    }

    /// Q alone, without the box check. For permutation domains the
    /// all-distinct condition is part of Q.
    bool satisfies_q(std::span<const T> values) const {
        if (repr_ == representation::permutation && !all_distinct(values))
            return false;
        return !q_ || q_(values);
    }

private:
    static bool bounded(T v) {
        if constexpr (std::same_as<T, double>) return std::isfinite(v);
        else return true;
    }

    static bool all_distinct(std::span<const T> values) {
        std::vector<T> sorted(values.begin(), values.end());
        std::sort(sorted.begin(), sorted.end());
        return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    }

    representation repr_;
    std::vector<interval<T>> genes_;
    predicate q_;
};

template <gene_value T>
using domain_ptr = std::shared_ptr<const genotype_domain<T>>;

/// c real genes, all on [lo, hi], optional extra predicate.
inline domain_ptr<double>
uniform_real_domain(std::size_t c, double lo, double hi,
                    genotype_domain<double>::predicate q = {}) {
    return std::make_shared<const genotype_domain<double>>(
        representation::floating_point,
        std::vector<interval<double>>(c, interval<double>{lo, hi}), std::move(q));
}

inline domain_ptr<double>
real_domain(std::vector<interval<double>> genes,
            genotype_domain<double>::predicate q = {}) {
    return std::make_shared<const genotype_domain<double>>(
        representation::floating_point, std::move(genes), std::move(q));
}

inline domain_ptr<std::int64_t>
uniform_integer_domain(std::size_t c, std::int64_t lo, std::int64_t hi,
                       genotype_domain<std::int64_t>::predicate q = {}) {
    return std::make_shared<const genotype_domain<std::int64_t>>(
        representation::integer,
        std::vector<interval<std::int64_t>>(c, interval<std::int64_t>{lo, hi}),
        std::move(q));
}

inline domain_ptr<std::int64_t> binary_domain(std::size_t c) {
    return std::make_shared<const genotype_domain<std::int64_t>>(
        representation::binary,
        std::vector<interval<std::int64_t>>(c, interval<std::int64_t>{0, 1}));
}

inline domain_ptr<std::int64_t>
permutation_domain(std::size_t c,
                   genotype_domain<std::int64_t>::predicate q = {}) {
    return std::make_shared<const genotype_domain<std::int64_t>>(
        representation::permutation,
        std::vector<interval<std::int64_t>>(
            c, interval<std::int64_t>{0, static_cast<std::int64_t>(c) - 1}),
        std::move(q));
}

// ---------------------------------------------------------------------------
// Genotype / population / evolution
// ---------------------------------------------------------------------------

/// Finite list of gene values created under a fixed domain. Immutable value
/// type; out-of-box values are representable (validate() classifies them).
template <gene_value T>
class genotype {
public:
    genotype(domain_ptr<T> domain, std::vector<T> values)
        : domain_(std::move(domain)), values_(std::move(values)) {
        if (!domain_) throw std::invalid_argument("genotype: null domain");
        if (values_.size() != domain_->size())
            throw size_mismatch("genotype: value count does not match domain length");
    }

    const genotype_domain<T>& domain() const { return *domain_; }
    const domain_ptr<T>& domain_ref() const { return domain_; }
    std::span<const T> values() const { return values_; }
    const std::vector<T>& value_vector() const { return values_; }
    std::size_t size() const { return values_.size(); }
    T operator[](std::size_t i) const { return values_[i]; }

private:
    domain_ptr<T> domain_;
    std::vector<T> values_;
};

template <gene_value T>
using population = std::vector<genotype<T>>;

template <gene_value T>
using evolution = std::vector<population<T>>;

enum class validity { in_g, in_box_not_g, out_of_box };

template <gene_value T>
validity validate(const genotype<T>& g) {
    if (!g.domain().in_box(g.values())) return validity::out_of_box;
    return g.domain().satisfies_q(g.values()) ? validity::in_g
                                              : validity::in_box_not_g;
}

/// Concatenation of populations, order preserving.
template <gene_value T>
population<T> flatten(std::span<const population<T>> pops) {
    population<T> out;
    std::size_t total = 0;
    for (const auto& p : pops) total += p.size();
    out.reserve(total);
    for (const auto& p : pops) out.insert(out.end(), p.begin(), p.end());
    return out;
}

template <gene_value T>
population<T> flatten(std::initializer_list<population<T>> pops) {
    return flatten(std::span<const population<T>>(pops.begin(), pops.size()));
}

// ---------------------------------------------------------------------------
// Extended fitness
// ---------------------------------------------------------------------------

/// Real fitness value extended with a distinguished minus-infinity symbol
/// assigned to genotypes violating Q. Totally ordered; minus infinity
/// compares strictly below every finite value and never enters sums.
class extended_fitness {
public:
    constexpr extended_fitness() = default;  // minus infinity

    constexpr explicit extended_fitness(double v) : value_(v), finite_(true) {}

    static constexpr extended_fitness negative_infinity() { return {}; }

    constexpr bool is_finite() const { return finite_; }

    constexpr double value() const {
        return finite_ ? value_ : -std::numeric_limits<double>::infinity();
    }

    friend constexpr bool operator==(extended_fitness a, extended_fitness b) {
        return a.finite_ == b.finite_ && (!a.finite_ || a.value_ == b.value_);
    }

    friend constexpr std::partial_ordering operator<=>(extended_fitness a,
                                                       extended_fitness b) {
        if (!a.finite_ && !b.finite_) return std::partial_ordering::equivalent;
        if (!a.finite_) return std::partial_ordering::less;
        if (!b.finite_) return std::partial_ordering::greater;
        return a.value_ <=> b.value_;
    }

private:
    double value_ = 0.0;
    bool finite_ = false;
};

// ---------------------------------------------------------------------------
// Randomness contract
// ---------------------------------------------------------------------------

/// Draw interface required by every stochastic component. Identical seed and
/// identical draw program yield identical values; a source is single-owner.
template <typename R>
concept random_source = requires(R& r, double a, double b, double p,
                                 std::int64_t i, std::int64_t j) {
    { r.normal() } -> std::convertible_to<double>;
    { r.uniform_real(a, b) } -> std::convertible_to<double>;
    { r.uniform_int(i, j) } -> std::convertible_to<std::int64_t>;
    { r.bernoulli(p) } -> std::convertible_to<bool>;
};

/// Default random source backed by mt19937_64. The generator identity is
/// part of the reproducibility contract and is recorded in benchmark output.
class rng {
public:
    static constexpr const char* algorithm = "mt19937_64";

    explicit rng(std::uint64_t seed) : engine_(seed) {}

    double normal() {
        std::normal_distribution<double> d(0.0, 1.0);
        return d(engine_);
    }

    double uniform_real(double a, double b) {
        std::uniform_real_distribution<double> d(a, b);
        return d(engine_);
    }

    std::int64_t uniform_int(std::int64_t a, std::int64_t b) {
        std::uniform_int_distribution<std::int64_t> d(a, b);
        return d(engine_);
    }

    bool bernoulli(double p) {
        std::bernoulli_distribution d(p);
        return d(engine_);
    }

private:
    std::mt19937_64 engine_;
};

static_assert(random_source<rng>);

inline constexpr std::size_t default_max_rejections = 1'000'000;

/// Fresh genotype with every gene drawn from U(X_i), resampled wholesale
/// until Q holds. Permutation domains draw a uniformly random permutation
/// directly (rejection only if a custom predicate narrows G further).
template <gene_value T, random_source R>
genotype<T> random_genotype(const domain_ptr<T>& d, R& r,
                            std::size_t max_rejections = default_max_rejections) {
    const std::size_t c = d->size();
    std::vector<T> values(c);
    for (std::size_t attempt = 0; attempt <= max_rejections; ++attempt) {
        if (d->repr() == representation::permutation) {
            if constexpr (std::same_as<T, std::int64_t>) {
                std::iota(values.begin(), values.end(), T{0});
                for (std::size_t i = c; i > 1; --i) {
                    const auto j = static_cast<std::size_t>(
                        r.uniform_int(0, static_cast<std::int64_t>(i) - 1));
                    std::swap(values[i - 1], values[j]);
                }
            }
        } else {
            for (std::size_t i = 0; i < c; ++i) {
                const auto& iv = d->gene(i);
                if constexpr (std::same_as<T, double>)
                    values[i] = r.uniform_real(iv.lo, iv.hi);
                else
                    values[i] = r.uniform_int(iv.lo, iv.hi);
            }
        }
        if (d->satisfies_q(values)) return genotype<T>(d, std::move(values));
    }
    throw rejection_budget_exhausted(
        "random_genotype: predicate Q too restrictive for naive sampling");
}

// ---------------------------------------------------------------------------
// Fitness database
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

template <gene_value T>
std::uint64_t gene_bits(T v) {
    if constexpr (std::same_as<T, double>)
        return std::bit_cast<std::uint64_t>(v);
    else
        return static_cast<std::uint64_t>(v);
}

}  // namespace detail

/// Memoized extended fitness f_Q. The user objective is invoked at most once
/// per distinct value vector; uniqueness is bit-exact on gene values.
/// Concurrent queries are admitted; the lock spans the objective call so a
/// racing first query still evaluates exactly once.
template <gene_value T>
class fitness_database {
public:
    using objective_fn = std::function<double(std::span<const T>)>;

    explicit fitness_database(objective_fn objective)
        : objective_(std::move(objective)) {
        if (!objective_)
            throw std::invalid_argument("fitness_database: null objective");
    }

    fitness_database(fitness_database&& other) noexcept {
        std::scoped_lock lock(other.mutex_);
        objective_ = std::move(other.objective_);
        table_ = std::move(other.table_);
    }

    fitness_database(const fitness_database&) = delete;
    fitness_database& operator=(const fitness_database&) = delete;

    extended_fitness operator()(const genotype<T>& g) {
        std::scoped_lock lock(mutex_);
        auto it = table_.find(g.value_vector());
        if (it != table_.end()) return it->second;
        extended_fitness result;
        if (g.domain().satisfies_q(g.values())) {
            const double v = objective_(g.values());
            if (!std::isfinite(v))
                throw objective_failure(
                    "fitness_database: objective returned non-finite value for g in G");
            result = extended_fitness(v);
        }
        table_.emplace(g.value_vector(), result);
        return result;
    }

    /// Number of distinct value vectors ever queried (the AUS source).
    std::size_t unique_count() const {
        std::scoped_lock lock(mutex_);
        return table_.size();
    }

private:
    struct key_hash {
        std::size_t operator()(const std::vector<T>& key) const {
            std::uint64_t h = 0x6c62272e07bb0142ULL;
            for (T v : key) h = detail::mix64(h ^ detail::gene_bits(v));
            return static_cast<std::size_t>(h);
        }
    };

    struct key_equal {
        bool operator()(const std::vector<T>& a, const std::vector<T>& b) const {
            if (a.size() != b.size()) return false;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (detail::gene_bits(a[i]) != detail::gene_bits(b[i])) return false;
            return true;
        }
    };

    objective_fn objective_;
    mutable std::mutex mutex_;
    std::unordered_map<std::vector<T>, extended_fitness, key_hash, key_equal> table_;
};

}  // namespace genelab
