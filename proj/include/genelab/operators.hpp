#pragma once

/// @file operators.hpp
/// Variation operators: mutations, recombinations, self-adaptive mutation,
/// the stochastic wrapper and recombination/mutation composition.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "core.hpp"

namespace genelab {

/// Variation v_{n,m}: takes exactly n parents to exactly m children.
/// Children always stay inside the gene box; Q may be violated (handled
/// downstream by the extended fitness).
template <gene_value T, random_source R = rng>
struct variation {
    std::size_t arity_in;
    std::size_t arity_out;
    std::function<population<T>(const population<T>&, R&)> apply_fn;

    population<T> apply(const population<T>& parents, R& r) const {
        if (parents.size() != arity_in)
            throw size_mismatch("variation: parent count does not match arity");
        population<T> children = apply_fn(parents, r);
        if (children.size() != arity_out)
            throw std::logic_error("variation: arity-out contract violated");
        return children;
    }
};

namespace detail {

template <gene_value T>
void require_repr(const genotype<T>& g, representation want, const char* op) {
    if (g.domain().repr() != want)
        throw wrong_representation(std::string(op) + ": requires " +
                                   to_string(want) + " representation");
}

inline double clamp_to(double v, const interval<double>& iv) {
    if (v < iv.lo) return iv.lo;
    if (v > iv.hi) return iv.hi;
    return v;
}

}  // namespace detail

/// Per gene, with probability p, add sigma * N(0,1); a value pushed out of
/// [a_i, b_i] is replaced by the violated endpoint. Bernoulli draws occur in
/// locus order 0..c-1 (reproducibility contract).
template <gene_value T = double, random_source R = rng>
variation<T, R> gaussian_mutation(double sigma, double p) {
    static_assert(std::same_as<T, double>,
                  "gaussian_mutation: floating-point representation only");
    return {1, 1, [sigma, p](const population<T>& parents, R& r) {
        const auto& g = parents[0];
        detail::require_repr(g, representation::floating_point,
                             "gaussian_mutation");
        std::vector<T> values(g.values().begin(), g.values().end());
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!r.bernoulli(p)) continue;
            values[i] = detail::clamp_to(values[i] + sigma * r.normal(),
                                         g.domain().gene(i));
        }
        return population<T>{genotype<T>(g.domain_ref(), std::move(values))};
    }};
}

/// Exchange the values of two loci drawn independently from U{0, c-1}
/// (coinciding loci yield a no-op). Works for any representation.
template <gene_value T, random_source R = rng>
variation<T, R> swap_mutation() {
    return {1, 1, [](const population<T>& parents, R& r) {
        const auto& g = parents[0];
        std::vector<T> values(g.values().begin(), g.values().end());
        const auto c = static_cast<std::int64_t>(values.size());
        const auto i = static_cast<std::size_t>(r.uniform_int(0, c - 1));
        const auto j = static_cast<std::size_t>(r.uniform_int(0, c - 1));
        std::swap(values[i], values[j]);
        return population<T>{genotype<T>(g.domain_ref(), std::move(values))};
    }};
}

/// Per gene, with probability p, replace the value by a fresh U(X_i) draw.
/// Binary, floating-point and integer representations only.
template <gene_value T, random_source R = rng>
variation<T, R> random_reset_mutation(double p) {
    return {1, 1, [p](const population<T>& parents, R& r) {
        const auto& g = parents[0];
        if (g.domain().repr() == representation::permutation)
            throw wrong_representation(
                "random_reset_mutation: permutation representation unsupported");
        std::vector<T> values(g.values().begin(), g.values().end());
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!r.bernoulli(p)) continue;
            const auto& iv = g.domain().gene(i);
            if constexpr (std::same_as<T, double>)
                values[i] = r.uniform_real(iv.lo, iv.hi);
            else
                values[i] = r.uniform_int(iv.lo, iv.hi);
        }
        return population<T>{genotype<T>(g.domain_ref(), std::move(values))};
    }};
}

// ---------------------------------------------------------------------------
// Self-adaptive mutation
// ---------------------------------------------------------------------------

/// tau_0 = 1 / sqrt(2c) with proportionality constant 1.
inline double default_tau0(std::size_t c) {
    return 1.0 / std::sqrt(2.0 * static_cast<double>(c));
}

/// tau_1 = 1 / sqrt(2 sqrt(c)) with proportionality constant 1.
inline double default_tau1(std::size_t c) {
    return 1.0 / std::sqrt(2.0 * std::sqrt(static_cast<double>(c)));
}

inline constexpr double default_sigma_floor = 1e-9;

/// Domain for self-adaptive genotypes (x_0..x_{c-1}, sigma_0..sigma_{c-1}).
/// Default sigma intervals are [1e-9, b_i - a_i]: strictly positive lower
/// bound so sigma cannot collapse to zero.
inline domain_ptr<double> self_adaptive_domain(
    const domain_ptr<double>& base,
    std::vector<interval<double>> sigma_domains = {}) {
    const std::size_t c = base->size();
    if (sigma_domains.empty()) {
        sigma_domains.reserve(c);
        for (std::size_t i = 0; i < c; ++i)
            sigma_domains.push_back({default_sigma_floor, base->gene(i).width()});
    }
    if (sigma_domains.size() != c)
        throw size_mismatch("self_adaptive_domain: need one sigma interval per gene");
    for (const auto& iv : sigma_domains)
        if (iv.lo <= 0.0)
            throw std::invalid_argument(
                "self_adaptive_domain: sigma intervals must be strictly positive");
    std::vector<interval<double>> genes(base->genes().begin(),
                                        base->genes().end());
    genes.insert(genes.end(), sigma_domains.begin(), sigma_domains.end());
    return real_domain(std::move(genes));
}

/// Two-stage mutation on a (x, sigma) genotype of length 2c. One shared
/// normal draw feeds the tau_0 term; each sigma gene gets its own draw and is
/// clamped to its interval; each x gene is then perturbed with the new
/// sigma_i' and clamped to X_i. Every gene mutates unconditionally.
/// Passing tau <= 0 selects the c-dependent default.
template <random_source R = rng>
variation<double, R> self_adaptive_mutation(double tau0 = 0.0,
                                            double tau1 = 0.0) {
    return {1, 1, [tau0, tau1](const population<double>& parents, R& r) {
        const auto& g = parents[0];
        detail::require_repr(g, representation::floating_point,
                             "self_adaptive_mutation");
        if (g.size() % 2 != 0)
            throw wrong_representation(
                "self_adaptive_mutation: genotype length must be 2c");
        const std::size_t c = g.size() / 2;
        const double t0 = tau0 > 0.0 ? tau0 : default_tau0(c);
        const double t1 = tau1 > 0.0 ? tau1 : default_tau1(c);
        std::vector<double> values(g.values().begin(), g.values().end());
        const double shared = r.normal();
        for (std::size_t i = 0; i < c; ++i) {
            const double s = values[c + i] * std::exp(t0 * shared + t1 * r.normal());
            values[c + i] = detail::clamp_to(s, g.domain().gene(c + i));
        }
        for (std::size_t i = 0; i < c; ++i) {
            const double x = values[i] + values[c + i] * r.normal();
            values[i] = detail::clamp_to(x, g.domain().gene(i));
        }
        return population<double>{
            genotype<double>(g.domain_ref(), std::move(values))};
    }};
}

// ---------------------------------------------------------------------------
// Recombinations
// ---------------------------------------------------------------------------

/// One child: per-gene midpoint of the two parents.
template <gene_value T = double, random_source R = rng>
variation<T, R> arithmetic_recombination() {
    static_assert(std::same_as<T, double>,
                  "arithmetic_recombination: floating-point representation only");
    return {2, 1, [](const population<T>& parents, R&) {
        const auto& a = parents[0];
        const auto& b = parents[1];
        detail::require_repr(a, representation::floating_point,
                             "arithmetic_recombination");
        std::vector<T> values(a.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] = (a[i] + b[i]) / 2.0;
        return population<T>{genotype<T>(a.domain_ref(), std::move(values))};
    }};
}

/// Two children copying the respective parents except one shared locus k,
/// drawn from U{0, c-1}, which becomes the parents' midpoint in both.
template <gene_value T = double, random_source R = rng>
variation<T, R> single_arithmetic_recombination() {
    static_assert(std::same_as<T, double>,
                  "single_arithmetic_recombination: floating-point representation only");
    return {2, 2, [](const population<T>& parents, R& r) {
        const auto& a = parents[0];
        const auto& b = parents[1];
        detail::require_repr(a, representation::floating_point,
                             "single_arithmetic_recombination");
        const auto k = static_cast<std::size_t>(
            r.uniform_int(0, static_cast<std::int64_t>(a.size()) - 1));
        std::vector<T> c1(a.values().begin(), a.values().end());
        std::vector<T> c2(b.values().begin(), b.values().end());
        const double mid = (a[k] + b[k]) / 2.0;
        c1[k] = mid;
        c2[k] = mid;
        return population<T>{genotype<T>(a.domain_ref(), std::move(c1)),
                             genotype<T>(a.domain_ref(), std::move(c2))};
    }};
}

/// Exchange the tails from locus k, drawn from U{0, c-1}. Binary,
/// floating-point and integer representations.
template <gene_value T, random_source R = rng>
variation<T, R> one_point_crossover() {
    return {2, 2, [](const population<T>& parents, R& r) {
        const auto& a = parents[0];
        const auto& b = parents[1];
        if (a.domain().repr() == representation::permutation)
            throw wrong_representation(
                "one_point_crossover: permutation representation unsupported");
        const auto k = static_cast<std::size_t>(
            r.uniform_int(0, static_cast<std::int64_t>(a.size()) - 1));
        std::vector<T> c1(a.values().begin(), a.values().end());
        std::vector<T> c2(b.values().begin(), b.values().end());
        for (std::size_t i = k; i < c1.size(); ++i) std::swap(c1[i], c2[i]);
        return population<T>{genotype<T>(a.domain_ref(), std::move(c1)),
                             genotype<T>(a.domain_ref(), std::move(c2))};
    }};
}

/// Permutation recombination: copy the first k genes (k drawn from
/// U{1, c-1}) from each parent to its child, then fill with the other
/// parent's unused genes in order of increasing loci.
template <gene_value T = std::int64_t, random_source R = rng>
variation<T, R> cut_and_crossfill() {
    static_assert(std::same_as<T, std::int64_t>,
                  "cut_and_crossfill: permutation representation only");
    return {2, 2, [](const population<T>& parents, R& r) {
        const auto& a = parents[0];
        const auto& b = parents[1];
        if (a.domain().repr() != representation::permutation)
            throw wrong_representation(
                "cut_and_crossfill: permutation representation required");
        const std::size_t c = a.size();
        if (c < 2)
            throw std::invalid_argument("cut_and_crossfill: requires c >= 2");
        const auto k = static_cast<std::size_t>(
            r.uniform_int(1, static_cast<std::int64_t>(c) - 1));
        auto fill = [c, k](const genotype<T>& head, const genotype<T>& rest) {
            std::vector<T> values(head.values().begin(),
                                  head.values().begin() + static_cast<std::ptrdiff_t>(k));
            std::vector<bool> used(c, false);
            for (T v : values) used[static_cast<std::size_t>(v)] = true;
            for (T v : rest.values())
                if (!used[static_cast<std::size_t>(v)]) values.push_back(v);
            return genotype<T>(head.domain_ref(), std::move(values));
        };
        return population<T>{fill(a, b), fill(b, a)};
    }};
}

// ---------------------------------------------------------------------------
// Stochastic wrapper and composition
// ---------------------------------------------------------------------------

/// Apply v with probability p, otherwise the arity-adjusting identity
/// i_{n,m} (pass-through, duplicate at random k, or delete at random k).
/// The Bernoulli draw always occurs first; k is drawn only on the identity
/// branch (reproducibility contract).
template <gene_value T, random_source R = rng>
variation<T, R> stochastic(variation<T, R> v, double p) {
    const std::size_t n = v.arity_in;
    const std::size_t m = v.arity_out;
    if (m + 1 < n || m > n + 1)
        throw std::invalid_argument(
            "stochastic: identity defined only for m in {n-1, n, n+1}");
    return {n, m,
            [v = std::move(v), p, n, m](const population<T>& parents, R& r) {
        if (r.bernoulli(p)) return v.apply(parents, r);
        if (m == n) return parents;
        const auto k = static_cast<std::size_t>(
            r.uniform_int(0, static_cast<std::int64_t>(n) - 1));
        population<T> out;
        out.reserve(m);
        for (std::size_t i = 0; i < n; ++i) {
            if (m == n - 1 && i == k) continue;
            out.push_back(parents[i]);
            if (m == n + 1 && i == k) out.push_back(parents[i]);
        }
        return out;
    }};
}

/// Canonical composition: recombination first, then the mutation mapped
/// independently onto every child.
template <gene_value T, random_source R = rng>
variation<T, R> compose_recombination_mutation(variation<T, R> recombination,
                                               variation<T, R> mutation) {
    if (recombination.arity_in != 2 || recombination.arity_out > 2)
        throw std::invalid_argument(
            "compose_recombination_mutation: expect v_{2,1} or v_{2,2} recombination");
    if (mutation.arity_in != 1 || mutation.arity_out != 1)
        throw std::invalid_argument(
            "compose_recombination_mutation: expect v_{1,1} mutation");
    const std::size_t m = recombination.arity_out;
    return {2, m,
            [recombination = std::move(recombination),
             mutation = std::move(mutation)](const population<T>& parents, R& r) {
        population<T> children = recombination.apply(parents, r);
        population<T> out;
        out.reserve(children.size());
        for (const auto& child : children) {
            population<T> mutated = mutation.apply({child}, r);
            out.push_back(std::move(mutated.front()));
        }
        return out;
    }};
}

}  // namespace genelab
