#pragma once

/// @file selection.hpp
/// Selection probability functions (FPS with windowing, linear and
/// exponential ranking) and sampling algorithms (roulette wheel, stochastic
/// universal sampling, generational selection).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "core.hpp"

namespace genelab {

/// Normalized probability vector over a population, aligned by member index.
/// Weights sum to 1 within 1e-12 and are exactly 0 for members violating Q.
struct selection_weights {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

namespace detail {

template <gene_value T>
std::vector<extended_fitness> fitnesses(const population<T>& pop,
                                        fitness_database<T>& db) {
    std::vector<extended_fitness> fs;
    fs.reserve(pop.size());
    for (const auto& g : pop) fs.push_back(db(g));
    return fs;
}

}  // namespace detail

/// Fitness proportional selection with windowing. The 1/mu' term and the
/// denominator use the valid-member count, which keeps the weights
/// normalized when some members violate Q and coincides with the
/// all-valid formula otherwise.
template <gene_value T>
selection_weights fps_weights(const population<T>& pop,
                              fitness_database<T>& db) {
    const auto fs = detail::fitnesses(pop, db);
    double f_min = 0.0;
    double f_sum = 0.0;
    std::size_t valid = 0;
    for (const auto& f : fs) {
        if (!f.is_finite()) continue;
        if (valid == 0 || f.value() < f_min) f_min = f.value();
        f_sum += f.value();
        ++valid;
    }
    if (valid == 0)
        throw no_valid_genotype("fps_weights: no genotype satisfies Q");
    const double mu_q = static_cast<double>(valid);
    const double denom = 1.0 - mu_q * f_min + f_sum;
    selection_weights w;
    w.values.resize(fs.size(), 0.0);
    for (std::size_t i = 0; i < fs.size(); ++i)
        if (fs[i].is_finite())
            w.values[i] = (fs[i].value() - f_min + 1.0 / mu_q) / denom;
    return w;
}

/// Order-preserving subsequence of members satisfying P.
template <gene_value T, typename Pred>
population<T> filter_population(const population<T>& pop, Pred&& p) {
    population<T> out;
    for (const auto& g : pop)
        if (p(g)) out.push_back(g);
    return out;
}

/// Stable sort by ascending f_Q; returns the sorted population and the index
/// permutation applied (sorted[j] == pop[perm[j]]).
template <gene_value T>
std::pair<population<T>, std::vector<std::size_t>>
sort_by_fitness(const population<T>& pop, fitness_database<T>& db) {
    const auto fs = detail::fitnesses(pop, db);
    std::vector<std::size_t> perm(pop.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(),
                     [&fs](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    population<T> sorted;
    sorted.reserve(pop.size());
    for (std::size_t i : perm) sorted.push_back(pop[i]);
    return {std::move(sorted), std::move(perm)};
}

struct linear_pressure {
    double s = 2.0;
};
struct exponential_pressure {};

namespace detail {

inline double linear_rank_weight(std::size_t mu_q, std::size_t j, double s) {
    if (mu_q == 1) return 1.0;
    const double n = static_cast<double>(mu_q);
    return (2.0 - s) / n +
           2.0 * static_cast<double>(j) * (s - 1.0) / (n * (n - 1.0));
}

inline double exponential_rank_weight(std::size_t mu_q, std::size_t j) {
    if (mu_q == 1) return 1.0;
    const double n = static_cast<double>(mu_q);
    const double e = std::exp(1.0);
    const double norm = (1.0 - e) / (n * (1.0 - e) + e - std::exp(1.0 - n));
    return norm * (1.0 - std::exp(-static_cast<double>(j)));
}

template <gene_value T, typename RankFn>
selection_weights ranking_weights_impl(const population<T>& pop,
                                       fitness_database<T>& db, RankFn&& rank) {
    const auto fs = detail::fitnesses(pop, db);
    std::vector<std::size_t> perm(pop.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(),
                     [&fs](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    std::size_t invalid = 0;
    for (const auto& f : fs)
        if (!f.is_finite()) ++invalid;
    const std::size_t mu_q = pop.size() - invalid;
    if (mu_q == 0)
        throw no_valid_genotype("ranking_weights: no genotype satisfies Q");
    selection_weights w;
    w.values.resize(pop.size(), 0.0);
    // Invalid members come first in the stable -inf-ascending order and
    // keep weight 0; valid members get rank weights scattered back to
    // the caller's indexing.
    for (std::size_t j = 0; j < mu_q; ++j)
        w.values[perm[invalid + j]] = rank(mu_q, j);
    return w;
}

}  // namespace detail

/// Linear ranking selection, pressure parameter 1 < s <= 2.
template <gene_value T>
selection_weights ranking_weights(const population<T>& pop,
                                  fitness_database<T>& db,
                                  linear_pressure pressure) {
    if (!(pressure.s > 1.0 && pressure.s <= 2.0))
        throw std::invalid_argument(
            "ranking_weights: linear pressure requires 1 < s <= 2");
    return detail::ranking_weights_impl(
        pop, db, [s = pressure.s](std::size_t mu_q, std::size_t j) {
            return detail::linear_rank_weight(mu_q, j, s);
        });
}

/// Exponential ranking selection (base e, no tunable parameter).
template <gene_value T>
selection_weights ranking_weights(const population<T>& pop,
                                  fitness_database<T>& db,
                                  exponential_pressure) {
    return detail::ranking_weights_impl(pop, db,
                                        detail::exponential_rank_weight);
}

namespace detail {

/// Cumulative-cell lookup with half-open cells [c_{i-1}, c_i); a draw at or
/// past the last boundary snaps to the last positive-weight member.
inline std::size_t wheel_lookup(const selection_weights& w, double u) {
    double cum = 0.0;
    std::size_t last_positive = 0;
    bool seen_positive = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > 0.0) {
            last_positive = i;
            seen_positive = true;
        }
        cum += w[i];
        if (cum > u && w[i] > 0.0) return i;
    }
    if (!seen_positive)
        throw std::invalid_argument("wheel_lookup: all weights are zero");
    return last_positive;
}

}  // namespace detail

/// One roulette-wheel spin: member i selected with probability w_i.
template <gene_value T, random_source R>
genotype<T> roulette_wheel(const population<T>& pop,
                           const selection_weights& w, R& r) {
    if (w.size() != pop.size())
        throw size_mismatch("roulette_wheel: weight/population size mismatch");
    return pop[detail::wheel_lookup(w, r.uniform_real(0.0, 1.0))];
}

/// Stochastic universal sampling: mu equidistant arms at u + j/mu from a
/// single draw u = U(0, 1/mu); output in arm order. Each member appears
/// either floor(mu w_i) or ceil(mu w_i) times.
template <gene_value T, random_source R>
population<T> sus_select(const population<T>& pop, const selection_weights& w,
                         std::size_t mu, R& r) {
    if (w.size() != pop.size())
        throw size_mismatch("sus_select: weight/population size mismatch");
    if (mu == 0) return {};
    const double step = 1.0 / static_cast<double>(mu);
    const double u = r.uniform_real(0.0, step);
    population<T> out;
    out.reserve(mu);
    double cum = 0.0;
    std::size_t i = 0;
    std::size_t last_positive = pop.size();
    for (std::size_t j = 0; j < mu; ++j) {
        const double arm = u + static_cast<double>(j) * step;
        while (i < pop.size() && !(cum + w[i] > arm && w[i] > 0.0)) {
            cum += w[i];
            if (w[i] > 0.0) last_positive = i;
            ++i;
        }
        if (i < pop.size()) {
            out.push_back(pop[i]);
        } else {
            // Roundoff past the last boundary: snap to the last
            // positive-weight member.
            if (last_positive == pop.size())
                throw std::invalid_argument("sus_select: all weights are zero");
            out.push_back(pop[last_positive]);
        }
    }
    return out;
}

/// From equally sized current generation and offspring, return the offspring.
template <gene_value T>
population<T> generational_select(const population<T>& current,
                                  const population<T>& offspring) {
    if (current.size() != offspring.size())
        throw size_mismatch("generational_select: populations must have equal size");
    return offspring;
}

/// Survivor-selection path: flatten the generations, compute weights over
/// the concatenation, SUS-select mu members.
template <gene_value T, typename WeightFn, random_source R>
population<T> select_from_generations(std::span<const population<T>> gens,
                                      WeightFn&& pi, std::size_t mu, R& r) {
    const population<T> pool = flatten(gens);
    return sus_select(pool, pi(pool), mu, r);
}

}  // namespace genelab
