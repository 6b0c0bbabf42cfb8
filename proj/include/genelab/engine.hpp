#pragma once

/// @file engine.hpp
/// The evolutionary loop: initialization, parent selection, tupled variation
/// application, survivor selection and compound termination conditions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <memory>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "core.hpp"
#include "operators.hpp"
#include "selection.hpp"

namespace genelab {

// ---------------------------------------------------------------------------
// Weighting choice
// ---------------------------------------------------------------------------

/// Selection probability family used for parent and survivor selection.
struct weighting {
    enum class kind { fps, linear_rs, exponential_rs };

    kind family = kind::fps;
    double s = 2.0;  // linear ranking pressure

    static weighting fps() { return {kind::fps, 2.0}; }
    static weighting linear_rs(double s = 2.0) { return {kind::linear_rs, s}; }
    static weighting exponential_rs() { return {kind::exponential_rs, 2.0}; }

    template <gene_value T>
    selection_weights operator()(const population<T>& pop,
                                 fitness_database<T>& db) const {
        switch (family) {
        case kind::fps: return fps_weights(pop, db);
        case kind::linear_rs: return ranking_weights(pop, db, linear_pressure{s});
        case kind::exponential_rs:
            return ranking_weights(pop, db, exponential_pressure{});
        }
        throw std::logic_error("weighting: unknown family");
    }
};

// ---------------------------------------------------------------------------
// Termination conditions
// ---------------------------------------------------------------------------

/// Predicate on (iteration counter, evolution so far), composable with
/// conjunction and disjunction.
struct termination_condition {
    struct max_iterations {
        std::size_t limit;
    };

    /// Best-so-far f_Q improved by less than min_improvement over the last
    /// `window` generations; requires at least window + 1 generations.
    struct plateau {
        std::size_t window = 100;
        double min_improvement = 0.0;
    };

    /// Some genotype, in any generation so far, reached f_Q >= threshold.
    struct target_fitness {
        double threshold;
    };

    /// Some member of the latest generation approximates the known minimum:
    /// |f_Q(g) - f_ref| <= eps_f and Euclidean |g - x_min| <= eps_x.
    /// f_ref is the engine-side (maximized) fitness at the minimum.
    struct minimum_localized {
        std::vector<double> x_min;
        double f_ref;
        double eps_f;
        double eps_x;
    };

    struct conjunction {
        std::vector<termination_condition> terms;
    };
    struct disjunction {
        std::vector<termination_condition> terms;
    };

    std::variant<max_iterations, plateau, target_fitness, minimum_localized,
                 conjunction, disjunction>
        node;

    static termination_condition after(std::size_t limit) {
        return {max_iterations{limit}};
    }
    static termination_condition on_plateau(std::size_t window,
                                            double min_improvement = 0.0) {
        return {plateau{window, min_improvement}};
    }
    static termination_condition at_fitness(double threshold) {
        return {target_fitness{threshold}};
    }
    static termination_condition near_minimum(std::vector<double> x_min,
                                              double f_ref, double eps_f,
                                              double eps_x) {
        return {minimum_localized{std::move(x_min), f_ref, eps_f, eps_x}};
    }
    static termination_condition all_of(std::vector<termination_condition> ts) {
        return {conjunction{std::move(ts)}};
    }
    static termination_condition any_of(std::vector<termination_condition> ts) {
        return {disjunction{std::move(ts)}};
    }
};

namespace detail {

/// Evaluation context kept incrementally by the engine so termination checks
/// do not need the full (possibly truncated) trajectory.
template <gene_value T>
struct termination_context {
    std::size_t iteration;
    /// Best-so-far f_Q after each generation, index-aligned with the
    /// evolution from its start (never truncated; plain doubles).
    std::span<const extended_fitness> best_so_far;
    const population<T>* latest;
    fitness_database<T>* db;
};

template <gene_value T>
double euclidean_distance(const genotype<T>& g, std::span<const double> x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = static_cast<double>(g[i]) - x[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

template <gene_value T>
bool evaluate_termination(const termination_condition& t,
                          const termination_context<T>& ctx) {
    using tc = termination_condition;
    return std::visit(
        [&ctx](const auto& node) -> bool {
            using N = std::decay_t<decltype(node)>;
            if constexpr (std::same_as<N, tc::max_iterations>) {
                return ctx.iteration >= node.limit;
            } else if constexpr (std::same_as<N, tc::plateau>) {
                const auto& best = ctx.best_so_far;
                if (best.size() < node.window + 1) return false;
                const auto recent = best.back();
                const auto old = best[best.size() - 1 - node.window];
                if (!recent.is_finite()) return true;  // still no valid member
                if (!old.is_finite()) return false;    // went from -inf to finite
                const double improvement = recent.value() - old.value();
                // With min_improvement 0 any strict improvement resets.
                return improvement < node.min_improvement || improvement == 0.0;
            } else if constexpr (std::same_as<N, tc::target_fitness>) {
                return !ctx.best_so_far.empty() &&
                       ctx.best_so_far.back() >= extended_fitness(node.threshold);
            } else if constexpr (std::same_as<N, tc::minimum_localized>) {
                if (!ctx.latest) return false;
                for (const auto& g : *ctx.latest) {
                    if (g.size() != node.x_min.size()) continue;
                    const auto f = (*ctx.db)(g);
                    if (!f.is_finite()) continue;
                    if (std::abs(f.value() - node.f_ref) > node.eps_f) continue;
                    if (euclidean_distance(g, node.x_min) <= node.eps_x)
                        return true;
                }
                return false;
            } else if constexpr (std::same_as<N, tc::conjunction>) {
                return std::all_of(node.terms.begin(), node.terms.end(),
                                   [&ctx](const termination_condition& term) {
                                       return evaluate_termination(term, ctx);
                                   });
            } else {
                return std::any_of(node.terms.begin(), node.terms.end(),
                                   [&ctx](const termination_condition& term) {
                                       return evaluate_termination(term, ctx);
                                   });
            }
        },
        t.node);
}

template <gene_value T>
extended_fitness best_fitness(const population<T>& pop,
                              fitness_database<T>& db) {
    extended_fitness best;  // -inf
    for (const auto& g : pop) {
        const auto f = db(g);
        if (f > best) best = f;
    }
    return best;
}

}  // namespace detail

/// Evaluate a termination condition against a full evolution trajectory.
template <gene_value T>
bool check_termination(const termination_condition& t, std::size_t iteration,
                       const evolution<T>& evo, fitness_database<T>& db) {
    if (evo.empty())
        throw std::invalid_argument("check_termination: evolution must be nonempty");
    std::vector<extended_fitness> best_so_far;
    best_so_far.reserve(evo.size());
    extended_fitness best;
    for (const auto& gen : evo) {
        const auto b = detail::best_fitness(gen, db);
        if (b > best) best = b;
        best_so_far.push_back(best);
    }
    detail::termination_context<T> ctx{iteration, best_so_far, &evo.back(), &db};
    return detail::evaluate_termination(t, ctx);
}

// ---------------------------------------------------------------------------
// Evolution configuration and loop
// ---------------------------------------------------------------------------

template <gene_value T, random_source R = rng>
struct evolution_config {
    std::size_t generation_size;              // mu
    std::size_t parent_count;                 // 2k, positive even
    variation<T, R> var;                      // composed v_{2,m}
    weighting parent_weighting = weighting::fps();
    weighting survivor_weighting = weighting::fps();
    termination_condition termination = termination_condition::after(100);
    std::size_t max_rejections = default_max_rejections;
    /// Number of trailing generations retained in the returned evolution;
    /// 0 keeps the full trajectory. Long benchmark runs cap this to bound
    /// memory; the best-so-far history is always complete.
    std::size_t history_limit = 0;
};

/// mu genotypes drawn from U(X_i) with wholesale rejection until Q holds.
template <gene_value T, random_source R>
population<T> first_generation(const evolution_config<T, R>& cfg,
                               const domain_ptr<T>& d, R& r) {
    population<T> pop;
    pop.reserve(cfg.generation_size);
    for (std::size_t i = 0; i < cfg.generation_size; ++i)
        pop.push_back(random_genotype(d, r, cfg.max_rejections));
    return pop;
}

/// One evolutionary step: SUS-select 2k parents, pair them in arm order,
/// apply the variation per pair, then survivor-select mu members from the
/// current generation plus offspring.
template <gene_value T, random_source R>
population<T> next_generation(const population<T>& current,
                              const evolution_config<T, R>& cfg,
                              fitness_database<T>& db, R& r) {
    if (cfg.parent_count == 0 || cfg.parent_count % 2 != 0)
        throw std::invalid_argument("next_generation: parent count must be positive even");
    if (cfg.var.arity_in != 2)
        throw std::invalid_argument("next_generation: variation must take 2 parents");
    const auto pw = cfg.parent_weighting(current, db);
    const population<T> parents = sus_select(current, pw, cfg.parent_count, r);
    population<T> offspring;
    offspring.reserve(cfg.parent_count / 2 * cfg.var.arity_out);
    for (std::size_t i = 0; i + 1 < parents.size(); i += 2) {
        population<T> children =
            cfg.var.apply({parents[i], parents[i + 1]}, r);
        for (auto& child : children) offspring.push_back(std::move(child));
    }
    const population<T> gens[2] = {current, std::move(offspring)};
    return select_from_generations<T>(
        std::span<const population<T>>(gens, 2),
        [&cfg, &db](const population<T>& pool) {
            return cfg.survivor_weighting(pool, db);
        },
        cfg.generation_size, r);
}

template <gene_value T>
struct evolve_result {
    /// Trajectory; the trailing window when cfg.history_limit > 0.
    evolution<T> generations;
    fitness_database<T> db;
    std::size_t iterations = 0;
    /// Best-so-far f_Q after each generation, from the initial one.
    std::vector<extended_fitness> best_so_far;
};

/// Run the GA loop: initialize, iterate next_generation, stop when the
/// termination predicate holds (checked after initialization and after every
/// step, so a lucky initial generation counts).
template <gene_value T, random_source R>
evolve_result<T> evolve(const evolution_config<T, R>& cfg,
                        const domain_ptr<T>& d,
                        typename fitness_database<T>::objective_fn objective,
                        R& r) {
    fitness_database<T> db(std::move(objective));
    evolution<T> evo;
    evo.push_back(first_generation(cfg, d, r));
    std::vector<extended_fitness> best_so_far;
    best_so_far.push_back(detail::best_fitness(evo.back(), db));
    std::size_t iter = 0;
    auto done = [&] {
        detail::termination_context<T> ctx{iter, best_so_far, &evo.back(), &db};
        return detail::evaluate_termination(cfg.termination, ctx);
    };
    while (!done()) {
        population<T> next = next_generation(evo.back(), cfg, db, r);
        evo.push_back(std::move(next));
        extended_fitness b = detail::best_fitness(evo.back(), db);
        if (b < best_so_far.back()) b = best_so_far.back();
        best_so_far.push_back(b);
        ++iter;
        if (cfg.history_limit > 0 && evo.size() > cfg.history_limit)
            evo.erase(evo.begin(),
                      evo.begin() + static_cast<std::ptrdiff_t>(
                                        evo.size() - cfg.history_limit));
    }
    return {std::move(evo), std::move(db), iter, std::move(best_so_far)};
}

}  // namespace genelab
