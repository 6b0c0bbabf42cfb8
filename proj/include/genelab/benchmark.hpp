#pragma once

/// @file benchmark.hpp
/// Tuning harness: parameter grid sweeps, repeated seeded runs, SR/AUS and
/// distance statistics, the AUS-vs-c scaling fit and CSV interchange.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "core.hpp"
#include "engine.hpp"
#include "operators.hpp"
#include "selection.hpp"
#include "test_functions.hpp"

namespace genelab {

// ---------------------------------------------------------------------------
// Parameter points
// ---------------------------------------------------------------------------

enum class variation_group {
    gaussian_arithmetic,
    gaussian_single_arithmetic,
    random_reset_single_arithmetic,
};

inline const char* to_string(variation_group g) {
    switch (g) {
    case variation_group::gaussian_arithmetic: return "gaussian-arithmetic";
    case variation_group::gaussian_single_arithmetic:
        return "gaussian-single-arithmetic";
    case variation_group::random_reset_single_arithmetic:
        return "random-reset-single-arithmetic";
    }
    return "?";
}

inline bool uses_gaussian(variation_group g) {
    return g != variation_group::random_reset_single_arithmetic;
}

inline const char* to_string(weighting::kind k) {
    switch (k) {
    case weighting::kind::fps: return "fps";
    case weighting::kind::linear_rs: return "lin-rs";
    case weighting::kind::exponential_rs: return "exp-rs";
    }
    return "?";
}

/// One cell of the tuning grid. Gaussian sigma is r * min_i(b_i - a_i);
/// the per-gene mutation rate is 1/c for both mutation kinds.
struct parameter_point {
    variation_group group;
    weighting::kind selection;
    std::string tf;
    std::size_t c;
    std::size_t two_k;
    double p_r;
    double p_m;
    std::optional<double> r;  // absent for random-reset
};

/// Paper protocol knobs with desk-scale defaults.
struct run_options {
    std::size_t generation_size = 100;
    double eps_f = 1e-1;
    double eps_x = 1e-2;
    std::size_t max_iterations = 100'000;
    schwefel_variant schwefel = schwefel_variant::double_sum;
    /// Trailing generations kept in memory during a run; termination only
    /// ever inspects the latest one.
    std::size_t history_limit = 2;
    /// Optional instrumentation: incremented on every objective invocation.
    std::atomic<std::size_t>* objective_call_counter = nullptr;
};

// ---------------------------------------------------------------------------
// Run records and aggregates
// ---------------------------------------------------------------------------

struct run_record {
    bool success = false;
    std::size_t unique_evaluations = 0;
    std::size_t iterations = 0;
    std::vector<double> best_point;
    double delta_f = 0.0;  // |f*(best) - f*(x_min)|
    double delta_x = 0.0;  // Euclidean |best - x_min|
    std::uint64_t seed = 0;
};

/// SR over all runs; AUS and distance statistics over the successful subset
/// (absent when there are no successes, sigmas absent for a singleton).
struct aggregate_stats {
    double sr = 0.0;  // percentage
    std::size_t run_count = 0;
    std::optional<double> aus;
    std::optional<double> sigma_aus;
    std::optional<double> mean_df;
    std::optional<double> sigma_df;
    std::optional<double> mean_dx;
    std::optional<double> sigma_dx;
};

namespace detail {

inline std::pair<double, std::optional<double>>
mean_and_sigma(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    if (xs.size() < 2) return {mean, std::nullopt};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace detail

inline aggregate_stats aggregate(const std::vector<run_record>& records) {
    if (records.empty())
        throw std::invalid_argument("aggregate: empty record list");
    aggregate_stats st;
    st.run_count = records.size();
    std::vector<double> aus, dfs, dxs;
    for (const auto& rec : records) {
        if (!rec.success) continue;
        aus.push_back(static_cast<double>(rec.unique_evaluations));
        dfs.push_back(rec.delta_f);
        dxs.push_back(rec.delta_x);
    }
    st.sr = 100.0 * static_cast<double>(aus.size()) /
            static_cast<double>(records.size());
    if (!aus.empty()) {
        std::tie(st.aus, st.sigma_aus) = detail::mean_and_sigma(aus);
        std::tie(st.mean_df, st.sigma_df) = detail::mean_and_sigma(dfs);
        std::tie(st.mean_dx, st.sigma_dx) = detail::mean_and_sigma(dxs);
    }
    return st;
}

// ---------------------------------------------------------------------------
// Single runs
// ---------------------------------------------------------------------------

namespace detail {

inline variation<double> build_variation(const parameter_point& pp,
                                         const test_function& tf) {
    const double p_gene = 1.0 / static_cast<double>(pp.c);
    variation<double> mutation =
        uses_gaussian(pp.group)
            ? gaussian_mutation(
                  pp.r.value() * std::ranges::min(tf.box, {}, [](auto iv) {
                                     return iv.width();
                                 }).width(),
                  p_gene)
            : random_reset_mutation<double>(p_gene);
    variation<double> recombination =
        pp.group == variation_group::gaussian_arithmetic
            ? arithmetic_recombination()
            : single_arithmetic_recombination();
    return compose_recombination_mutation(
        stochastic(std::move(recombination), pp.p_r),
        stochastic(std::move(mutation), pp.p_m));
}

inline weighting build_weighting(weighting::kind k) {
    switch (k) {
    case weighting::kind::fps: return weighting::fps();
    case weighting::kind::linear_rs: return weighting::linear_rs(2.0);
    case weighting::kind::exponential_rs: return weighting::exponential_rs();
    }
    throw std::logic_error("build_weighting: unknown kind");
}

}  // namespace detail

/// One seeded GA run against pp's test function: fitness is the negated
/// test function (the engine maximizes), termination is minimum-localized
/// or the iteration cap, SUS drives both selections.
inline run_record run_single(const parameter_point& pp, std::uint64_t seed,
                             const run_options& opts = {}) {
    if (pp.two_k == 0 || pp.two_k % 2 != 0)
        throw std::invalid_argument("run_single: 2k must be positive even");
    if (uses_gaussian(pp.group) && !pp.r)
        throw std::invalid_argument("run_single: Gaussian groups require r");
    const test_function tf = make_test_function(pp.tf, pp.c, opts.schwefel);
    const double f_ref = -tf.f_min;

    evolution_config<double> cfg;
    cfg.generation_size = opts.generation_size;
    cfg.parent_count = pp.two_k;
    cfg.var = detail::build_variation(pp, tf);
    cfg.parent_weighting = detail::build_weighting(pp.selection);
    cfg.survivor_weighting = cfg.parent_weighting;
    cfg.termination = termination_condition::any_of(
        {termination_condition::near_minimum(tf.x_min, f_ref, opts.eps_f,
                                             opts.eps_x),
         termination_condition::after(opts.max_iterations)});
    cfg.history_limit = opts.history_limit;

    rng r(seed);
    auto counter = opts.objective_call_counter;
    auto result = evolve<double>(
        cfg, tf.domain(),
        [&tf, counter](std::span<const double> x) {
            if (counter) counter->fetch_add(1, std::memory_order_relaxed);
            return -tf.eval(x);
        },
        r);

    run_record rec;
    rec.seed = seed;
    rec.iterations = result.iterations;
    rec.unique_evaluations = result.db.unique_count();

    // Success: some member of the final generation meets both epsilon
    // conditions. Best point: the closest qualifying member, otherwise the
    // fittest member of the final generation.
    const population<double>& last = result.generations.back();
    const genotype<double>* best = nullptr;
    extended_fitness best_f;
    bool success = false;
    double best_dx = 0.0, best_df = 0.0;
    for (const auto& g : last) {
        const auto f = result.db(g);
        if (!f.is_finite()) continue;
        const double df = std::abs(f.value() - f_ref);
        const double dx = detail::euclidean_distance(g, tf.x_min);
        const bool ok = df <= opts.eps_f && dx <= opts.eps_x;
        if (ok) {
            if (!success || dx < best_dx) {
                best = &g;
                best_dx = dx;
                best_df = df;
            }
            success = true;
        } else if (!success && (!best || f > best_f)) {
            best = &g;
            best_f = f;
            best_dx = dx;
            best_df = df;
        }
    }
    if (best) {
        rec.best_point.assign(best->values().begin(), best->values().end());
        rec.delta_f = best_df;
        rec.delta_x = best_dx;
        rec.success = success;
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Grid runs
// ---------------------------------------------------------------------------

struct grid_row_result {
    parameter_point point;
    aggregate_stats stats;
    std::string error;  // nonempty when the point failed to run
};

/// Schedule-independent per-run seed: a 64-bit mix of master seed, point
/// index and run index.
inline std::uint64_t derive_seed(std::uint64_t master, std::size_t point_index,
                                 std::size_t run_index) {
    return detail::mix64(master ^
                         detail::mix64((static_cast<std::uint64_t>(point_index)
                                        << 32) ^
                                       static_cast<std::uint64_t>(run_index)));
}

/// Run the whole grid, runs_per_point seeded runs per cell, up to
/// `parallelism` concurrent runs. Output is independent of the parallelism
/// degree and of execution order; per-point errors are recorded in the row.
inline std::vector<grid_row_result>
run_grid(const std::vector<parameter_point>& grid, std::size_t runs_per_point,
         std::uint64_t master_seed, std::size_t parallelism,
         const run_options& opts = {}) {
    if (runs_per_point == 0)
        throw std::invalid_argument("run_grid: runs-per-point must be positive");
    struct task {
        std::size_t point;
        std::size_t run;
    };
    std::vector<task> tasks;
    tasks.reserve(grid.size() * runs_per_point);
    for (std::size_t p = 0; p < grid.size(); ++p)
        for (std::size_t j = 0; j < runs_per_point; ++j) tasks.push_back({p, j});

    std::vector<run_record> records(tasks.size());
    std::vector<std::string> errors(grid.size());
    std::mutex error_mutex;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t t = next.fetch_add(1, std::memory_order_relaxed);
            if (t >= tasks.size()) return;
            const auto [p, j] = tasks[t];
            try {
                records[t] =
                    run_single(grid[p], derive_seed(master_seed, p, j), opts);
            } catch (const std::exception& e) {
                std::scoped_lock lock(error_mutex);
                if (errors[p].empty()) errors[p] = e.what();
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, parallelism);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }

    std::vector<grid_row_result> rows;
    rows.reserve(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) {
        grid_row_result row{grid[p], {}, errors[p]};
        if (row.error.empty()) {
            std::vector<run_record> rs(
                records.begin() + static_cast<std::ptrdiff_t>(p * runs_per_point),
                records.begin() +
                    static_cast<std::ptrdiff_t>((p + 1) * runs_per_point));
            row.stats = aggregate(rs);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Tables and fits
// ---------------------------------------------------------------------------

/// Max SR over (2k, p_r, p_m, r) per (group, selection, c, tf) cell.
using sr_cell = std::tuple<variation_group, weighting::kind, std::size_t,
                           std::string>;

inline std::map<sr_cell, double>
best_sr_table(const std::vector<grid_row_result>& rows) {
    std::map<sr_cell, double> out;
    for (const auto& row : rows) {
        if (!row.error.empty()) continue;
        const sr_cell cell{row.point.group, row.point.selection, row.point.c,
                           row.point.tf};
        auto [it, inserted] = out.emplace(cell, row.stats.sr);
        if (!inserted) it->second = std::max(it->second, row.stats.sr);
    }
    return out;
}

/// Ordinary least squares of ln(AUS) on ln(c): returns the slope and its
/// standard error.
inline std::pair<double, double>
fit_scaling_exponent(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3)
        throw std::invalid_argument("fit_scaling_exponent: need at least 3 points");
    std::vector<double> xs, ys;
    for (const auto& [c, aus] : points) {
        if (c <= 0.0 || aus <= 0.0)
            throw std::invalid_argument(
                "fit_scaling_exponent: c and AUS must be positive");
        xs.push_back(std::log(c));
        ys.push_back(std::log(aus));
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0)
        throw std::invalid_argument("fit_scaling_exponent: c values must be distinct");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double resid = ys[i] - (intercept + slope * xs[i]);
        ss_res += resid * resid;
    }
    const double stderr_slope = std::sqrt(ss_res / (n - 2.0) / sxx);
    return {slope, stderr_slope};
}

// ---------------------------------------------------------------------------
// CSV interchange
// ---------------------------------------------------------------------------

inline constexpr const char* csv_header =
    "group,selection,tf,c,two_k,p_r,p_m,r,runs,sr,aus,sigma_aus,"
    "mean_df,sigma_df,mean_dx,sigma_dx";

namespace detail {

inline std::string format_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string format_opt(const std::optional<double>& v) {
    return v ? format_g6(*v) : std::string{};
}

}  // namespace detail

inline void write_csv(std::ostream& os,
                      const std::vector<grid_row_result>& rows) {
    os << csv_header << '\n';
    for (const auto& row : rows) {
        const auto& pp = row.point;
        os << to_string(pp.group) << ',' << to_string(pp.selection) << ','
           << pp.tf << ',' << pp.c << ',' << pp.two_k << ','
           << detail::format_g6(pp.p_r) << ',' << detail::format_g6(pp.p_m)
           << ',' << (pp.r ? detail::format_g6(*pp.r) : std::string{}) << ','
           << row.stats.run_count << ',';
        if (row.error.empty()) {
            os << detail::format_g6(row.stats.sr) << ','
               << detail::format_opt(row.stats.aus) << ','
               << detail::format_opt(row.stats.sigma_aus) << ','
               << detail::format_opt(row.stats.mean_df) << ','
               << detail::format_opt(row.stats.sigma_df) << ','
               << detail::format_opt(row.stats.mean_dx) << ','
               << detail::format_opt(row.stats.sigma_dx);
        } else {
            os << ",,,,,,";
        }
        os << '\n';
    }
}

// ---------------------------------------------------------------------------
// Grid construction
// ---------------------------------------------------------------------------

/// Dimension schedule per variation group (Gaussian groups stop earlier).
inline std::vector<std::size_t> dimension_schedule(variation_group g) {
    switch (g) {
    case variation_group::gaussian_arithmetic: return {2, 4, 8};
    case variation_group::gaussian_single_arithmetic: return {2, 4, 8, 16};
    case variation_group::random_reset_single_arithmetic:
        return {2, 4, 8, 16, 32};
    }
    return {};
}

/// True when the registry entry admits dimension c.
inline bool tf_supports_dimension(const test_function_info& info,
                                  std::size_t c) {
    if (info.scalable) return c >= info.min_dimension;
    return c == info.native_dimension;
}

struct grid_selectors {
    std::vector<variation_group> groups = {
        variation_group::gaussian_arithmetic,
        variation_group::gaussian_single_arithmetic,
        variation_group::random_reset_single_arithmetic};
    std::vector<weighting::kind> selections = {weighting::kind::fps,
                                               weighting::kind::linear_rs,
                                               weighting::kind::exponential_rs};
    std::vector<std::string> tfs;          // empty: all 16
    std::vector<std::size_t> dimensions;   // empty: per-group schedule
    std::vector<std::size_t> two_k = {2, 4, 8, 16, 32, 64};
    std::vector<double> p_r = {1.0, 0.5};
    std::vector<double> p_m = {1.0, 0.5};
    std::vector<double> r = {0.5, 0.05, 0.005};
};

/// Expand selectors into parameter points, intersecting requested dimensions
/// with each group's schedule and each test function's supported arity.
/// Unknown test-function names are rejected.
inline std::vector<parameter_point> build_grid(const grid_selectors& sel) {
    std::vector<std::string> tfs = sel.tfs;
    if (tfs.empty())
        for (const auto& info : test_function_registry()) tfs.push_back(info.name);
    std::vector<const test_function_info*> infos;
    for (const auto& name : tfs) {
        const test_function_info* found = nullptr;
        for (const auto& info : test_function_registry())
            if (info.name == name) found = &info;
        if (!found) throw unknown_test_function("unknown test function: " + name);
        infos.push_back(found);
    }
    std::vector<parameter_point> grid;
    for (auto group : sel.groups) {
        std::vector<std::size_t> dims = dimension_schedule(group);
        if (!sel.dimensions.empty()) {
            std::erase_if(dims, [&sel](std::size_t c) {
                return std::find(sel.dimensions.begin(), sel.dimensions.end(),
                                 c) == sel.dimensions.end();
            });
        }
        const std::vector<double> rs =
            uses_gaussian(group) ? sel.r : std::vector<double>{0.0};
        for (auto selection : sel.selections)
            for (const auto* info : infos)
                for (std::size_t c : dims) {
                    if (!tf_supports_dimension(*info, c)) continue;
                    for (std::size_t two_k : sel.two_k)
                        for (double p_r : sel.p_r)
                            for (double p_m : sel.p_m)
                                for (double r : rs)
                                    grid.push_back(
                                        {group, selection, info->name, c, two_k,
                                         p_r, p_m,
                                         uses_gaussian(group)
                                             ? std::optional<double>(r)
                                             : std::nullopt});
                }
    }
    return grid;
}

}  // namespace genelab
