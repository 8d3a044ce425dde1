#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "koszulfp/cli.hpp"

namespace {

koszul::cli::json read_input(const std::string& path) {
    if (path.empty() || path == "-") {
        koszul::cli::json doc;
        std::cin >> doc;
        return doc;
    }
    std::ifstream in(path);
    if (!in) throw koszul::error("cannot open input file: " + path);
    koszul::cli::json doc;
    in >> doc;
    return doc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "koszulfp: graded (co)homology of connected graded algebras over prime fields,\n"
        "quadraticity/Koszulity checks, and cohomology of elementary-type pro-p groups"};
    app.require_subcommand(1);
    app.fallthrough();  // allow global flags after the subcommand name

    std::string input_path, cache_dir, route = "both", output_path;
    size_t max_degree = 0, count = 0;
    uint64_t seed = 0, epoch = 0;
    unsigned jobs = 1;
    int i_max = -1, j_max = -1;
    bool have_seed = false, have_count = false, have_epoch = false;

    app.add_option("--input", input_path, "input document (JSON file, or - for stdin)");
    app.add_option("--max-degree", max_degree, "override the truncation degree");
    auto* seed_opt = app.add_option("--seed", seed, "search seed");
    auto* count_opt = app.add_option("--count", count, "number of search samples");
    app.add_option("--jobs", jobs, "worker pool size");
    app.add_option("--route", route, "criterion route: direct | dual | both");
    app.add_option("--cache-dir", cache_dir, "content-addressed homology cell cache");
    app.add_option("--i-max", i_max, "homological degree bound");
    app.add_option("--j-max", j_max, "internal degree bound");
    auto* epoch_opt =
        app.add_option("--epoch", epoch, "pin record timestamps (reproducible output)");
    app.add_option("--output", output_path, "write the output document here (default stdout)");

    for (const char* name :
         {"homology", "quadratic-check", "koszul-check", "dual", "criterion-b", "five-term",
          "group", "theorem-c", "search"})
        app.add_subcommand(name);

    CLI11_PARSE(app, argc, argv);
    have_seed = seed_opt->count() > 0;
    have_count = count_opt->count() > 0;
    have_epoch = epoch_opt->count() > 0;

    try {
        koszul::cli::json doc = read_input(input_path);
        std::string command = app.get_subcommands().front()->get_name();
        koszul::cli::JobSpec job = koszul::cli::job_from_input(command, doc);
        if (max_degree) job.truncation = max_degree;
        if (have_seed) job.seed = seed;
        if (have_count) job.count = count;
        if (have_epoch) job.epoch = epoch;
        if (i_max >= 0) job.i_max = i_max;
        if (j_max >= 0) job.j_max = j_max;
        job.jobs = jobs;
        job.cache_dir = cache_dir;
        if (route == "direct")
            job.route = koszul::VanishingRoute::Direct;
        else if (route == "dual")
            job.route = koszul::VanishingRoute::DualViaJ;
        else if (route == "both")
            job.route = koszul::VanishingRoute::Both;
        else {
            std::cerr << "unknown route: " << route << "\n";
            return 2;
        }

        koszul::cli::RunResult res = koszul::cli::run(job);
        if (output_path.empty()) {
            std::cout << res.output.dump(2) << "\n";
        } else {
            std::ofstream out(output_path);
            out << res.output.dump(2) << "\n";
        }
        return res.exit_code;
    } catch (const koszul::cli::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
