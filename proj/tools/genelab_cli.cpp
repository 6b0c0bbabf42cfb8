// genelab command-line tool: benchmark sweeps, best-SR tables, plot data and
// the test-function catalogue.

#include <CLI11.hpp>

#include <genelab/genelab.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace genelab;

variation_group parse_group(const std::string& s) {
    if (s == "gaussian-arithmetic") return variation_group::gaussian_arithmetic;
    if (s == "gaussian-single-arithmetic")
        return variation_group::gaussian_single_arithmetic;
    if (s == "random-reset-single-arithmetic")
        return variation_group::random_reset_single_arithmetic;
    throw CLI::ValidationError("group", "unknown variation group: " + s);
}

weighting::kind parse_selection(const std::string& s) {
    if (s == "fps") return weighting::kind::fps;
    if (s == "lin-rs") return weighting::kind::linear_rs;
    if (s == "exp-rs") return weighting::kind::exponential_rs;
    throw CLI::ValidationError("selection", "unknown selection: " + s);
}

std::size_t default_jobs() {
    if (const char* env = std::getenv("GENELAB_JOBS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Flat "key = value" config, comma-separated lists, no sections. Flags win
// over config values; unknown keys are reported with their line number.
std::map<std::string, std::pair<std::string, std::size_t>>
read_flat_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    std::map<std::string, std::pair<std::string, std::size_t>> kv;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    while (std::getline(is, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        kv[trim(stripped.substr(0, eq))] = {trim(stripped.substr(eq + 1)),
                                            lineno};
    }
    return kv;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

struct bench_config {
    std::vector<std::string> tfs;
    std::vector<std::string> groups;
    std::vector<std::string> selections;
    std::vector<std::size_t> dimensions;
    std::vector<std::size_t> two_k;
    std::vector<double> p_r;
    std::vector<double> p_m;
    std::vector<double> r;
    std::size_t runs = 100;
    std::uint64_t seed = 0;
    std::size_t jobs = default_jobs();
    std::string out = "bench.csv";
    double eps_f = 1e-1;
    double eps_x = 1e-2;
    std::size_t max_iter = 100'000;
};

int cmd_bench(const bench_config& bc) {
    grid_selectors sel;
    if (!bc.tfs.empty()) sel.tfs = bc.tfs;
    if (!bc.groups.empty()) {
        sel.groups.clear();
        for (const auto& g : bc.groups) sel.groups.push_back(parse_group(g));
    }
    if (!bc.selections.empty()) {
        sel.selections.clear();
        for (const auto& s : bc.selections)
            sel.selections.push_back(parse_selection(s));
    }
    if (!bc.dimensions.empty()) sel.dimensions = bc.dimensions;
    if (!bc.two_k.empty()) sel.two_k = bc.two_k;
    if (!bc.p_r.empty()) sel.p_r = bc.p_r;
    if (!bc.p_m.empty()) sel.p_m = bc.p_m;
    if (!bc.r.empty()) sel.r = bc.r;

    const auto grid = build_grid(sel);
    run_options opts;
    opts.eps_f = bc.eps_f;
    opts.eps_x = bc.eps_x;
    opts.max_iterations = bc.max_iter;

    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = run_grid(grid, bc.runs, bc.seed, bc.jobs, opts);
    const auto elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0)
                             .count();

    std::ofstream os(bc.out);
    if (!os) {
        std::cerr << "error: cannot open output file: " << bc.out << '\n';
        return 1;
    }
    write_csv(os, rows);

    std::size_t failed = 0;
    for (const auto& row : rows)
        if (!row.error.empty()) ++failed;
    std::cout << "points run: " << rows.size() << " (" << failed
              << " failed)\ntotal runs: " << rows.size() * bc.runs
              << "\nrng: " << rng::algorithm << ", master seed " << bc.seed
              << "\nelapsed: " << elapsed << " s\nwrote " << bc.out << '\n';
    for (const auto& row : rows)
        if (!row.error.empty())
            std::cerr << "point error (" << row.point.tf << "): " << row.error
                      << '\n';
    return 0;
}

// Minimal reader for the CSV written by cmd_bench: only the columns the
// table needs.
struct csv_row {
    std::string group;
    std::string selection;
    std::string tf;
    std::size_t c = 0;
    std::optional<double> sr;
};

std::vector<csv_row> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != csv_header)
        throw std::runtime_error("malformed CSV: unexpected header");
    std::vector<csv_row> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        // A trailing empty field is dropped by getline; restore it.
        while (fields.size() < 16) fields.emplace_back();
        if (fields.size() != 16)
            throw std::runtime_error("malformed CSV at line " +
                                     std::to_string(lineno));
        csv_row row;
        row.group = fields[0];
        row.selection = fields[1];
        row.tf = fields[2];
        row.c = static_cast<std::size_t>(std::stoul(fields[3]));
        if (!fields[9].empty()) row.sr = std::stod(fields[9]);
        rows.push_back(std::move(row));
    }
    return rows;
}

int cmd_table(const std::string& csv_path) {
    std::ifstream is(csv_path);
    if (!is) {
        std::cerr << "error: cannot open " << csv_path << '\n';
        return 1;
    }
    std::vector<csv_row> rows;
    try {
        rows = read_csv(is);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    // Best SR per (group, selection, c) row and TF column.
    std::map<std::tuple<std::string, std::string, std::size_t>,
             std::map<std::string, double>>
        table;
    std::set<std::string> tf_names;
    for (const auto& row : rows) {
        if (!row.sr) continue;
        auto& cell = table[{row.group, row.selection, row.c}];
        auto [it, inserted] = cell.emplace(row.tf, *row.sr);
        if (!inserted) it->second = std::max(it->second, *row.sr);
        tf_names.insert(row.tf);
    }

    std::cout << "group,selection,c";
    for (const auto& tf : tf_names) std::cout << ',' << tf;
    std::cout << '\n';
    for (const auto& [key, cells] : table) {
        const auto& [group, selection, c] = key;
        std::cout << group << ',' << selection << ',' << c;
        for (const auto& tf : tf_names) {
            auto it = cells.find(tf);
            std::cout << ',';
            if (it == cells.end())
                std::cout << "--";
            else
                std::cout << it->second;
        }
        std::cout << '\n';
    }
    return 0;
}

int cmd_plotdata(const std::string& tf_name, std::size_t resolution,
                 const std::string& out) {
    try {
        const auto tf = make_test_function(tf_name, 2);
        std::ofstream os(out);
        if (!os) {
            std::cerr << "error: cannot open output file: " << out << '\n';
            return 1;
        }
        write_grid_sample(os, tf, resolution);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

int cmd_list() {
    for (const auto& info : test_function_registry()) {
        const auto tf = make_test_function(info.name);
        std::cout << info.name << "  c="
                  << (info.scalable ? std::string("n")
                                    : std::to_string(info.native_dimension))
                  << "  box=[" << info.box_per_dim.lo << ", "
                  << info.box_per_dim.hi << "]  x_min=(";
        for (std::size_t i = 0; i < tf.x_min.size(); ++i) {
            if (i) std::cout << ", ";
            std::cout << tf.x_min[i];
        }
        std::cout << ")  f_min=" << tf.f_min << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"genetic-algorithm benchmark tool"};
    app.require_subcommand(1);

    bench_config bc;
    std::string config_path;
    auto* bench = app.add_subcommand("bench", "run a benchmark grid, write CSV");
    bench->add_option("--config", config_path, "flat key = value config file");
    bench->add_option("--tf", bc.tfs, "test functions (default: all)")
        ->delimiter(',');
    bench->add_option("--group", bc.groups, "variation groups")->delimiter(',');
    bench->add_option("--selection", bc.selections, "selection kinds")
        ->delimiter(',');
    bench->add_option("--c", bc.dimensions, "dimensions")->delimiter(',');
    bench->add_option("--two-k", bc.two_k, "parent multiset sizes")
        ->delimiter(',');
    bench->add_option("--p-r", bc.p_r, "recombination probabilities")
        ->delimiter(',');
    bench->add_option("--p-m", bc.p_m, "mutation probabilities")->delimiter(',');
    bench->add_option("--r", bc.r, "gaussian sigma factors")->delimiter(',');
    bench->add_option("--runs", bc.runs, "runs per grid point");
    bench->add_option("--seed", bc.seed, "master seed");
    bench->add_option("--jobs", bc.jobs,
                      "parallel runs (default: GENELAB_JOBS or hardware)");
    bench->add_option("--out", bc.out, "output CSV path");
    bench->add_option("--eps-f", bc.eps_f, "codomain precision");
    bench->add_option("--eps-x", bc.eps_x, "domain precision");
    bench->add_option("--max-iter", bc.max_iter, "iteration cap");

    std::string table_csv;
    auto* table = app.add_subcommand("table", "best-SR table from a bench CSV");
    table->add_option("csv", table_csv, "CSV written by bench")->required();

    std::string plot_tf = "sphere";
    std::size_t plot_res = 101;
    std::string plot_out = "plot.dat";
    auto* plot = app.add_subcommand("plotdata",
                                    "sample a 2d test function on a lattice");
    plot->add_option("--tf", plot_tf, "test function name");
    plot->add_option("--resolution", plot_res, "lattice resolution");
    plot->add_option("--out", plot_out, "output path");

    auto* list = app.add_subcommand("list", "describe the test functions");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bench->parsed() && !config_path.empty()) {
            const auto kv = read_flat_config(config_path);
            auto flag_given = [&bench](const std::string& name) {
                const auto* opt = bench->get_option_no_throw("--" + name);
                return opt && opt->count() > 0;
            };
            for (const auto& [key, entry] : kv) {
                const auto& [value, lineno] = entry;
                if (flag_given(key)) continue;  // flags override the config
                try {
                    if (key == "tf") bc.tfs = split_list(value);
                    else if (key == "group") bc.groups = split_list(value);
                    else if (key == "selection") bc.selections = split_list(value);
                    else if (key == "c" || key == "two-k") {
                        auto& dst = key == "c" ? bc.dimensions : bc.two_k;
                        dst.clear();
                        for (const auto& v : split_list(value))
                            dst.push_back(std::stoul(v));
                    } else if (key == "p-r" || key == "p-m" || key == "r") {
                        auto& dst = key == "p-r" ? bc.p_r
                                    : key == "p-m" ? bc.p_m
                                                   : bc.r;
                        dst.clear();
                        for (const auto& v : split_list(value))
                            dst.push_back(std::stod(v));
                    } else if (key == "runs") bc.runs = std::stoul(value);
                    else if (key == "seed") bc.seed = std::stoull(value);
                    else if (key == "jobs") bc.jobs = std::stoul(value);
                    else if (key == "out") bc.out = value;
                    else if (key == "eps-f") bc.eps_f = std::stod(value);
                    else if (key == "eps-x") bc.eps_x = std::stod(value);
                    else if (key == "max-iter") bc.max_iter = std::stoul(value);
                    else {
                        std::cerr << "error: " << config_path << ":" << lineno
                                  << ": unknown key '" << key << "'\n";
                        return 1;
                    }
                } catch (const std::invalid_argument&) {
                    std::cerr << "error: " << config_path << ":" << lineno
                              << ": bad value for '" << key << "'\n";
                    return 1;
                }
            }
        }
        if (bench->parsed()) return cmd_bench(bc);
        if (table->parsed()) return cmd_table(table_csv);
        if (plot->parsed()) return cmd_plotdata(plot_tf, plot_res, plot_out);
        if (list->parsed()) return cmd_list();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
