#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "pqs/pipeline.hpp"

namespace {

std::string join_degrees(const std::vector<long long>& ds) {
    std::string s;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(ds[i]);
    }
    return s.empty() ? "none" : s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Classifies regular product-quotient surfaces with finite abelian group,\n"
        "at most canonical singularities, and a bounded canonical base locus,\n"
        "for a prescribed geometric genus. All arithmetic is exact."};

    pqs::RunConfig cfg;
    std::string format = "jsonl";
    std::string out_path;
    std::string convention = "b_minus";

    app.add_option("--pg", cfg.pg, "geometric genus of the surfaces (>= 3)")
        ->required();
    app.add_option("--max-base-points", cfg.max_base_points,
                   "largest allowed number of isolated canonical base points")
        ->capture_default_str();
    app.add_flag("--only-free", cfg.only_free,
                 "keep only smooth quotients (empty singularity basket)");
    app.add_option("--max-group-order", cfg.max_group_order,
                   "cap the group order below the theoretical bound");
    app.add_option("--jobs,-j", cfg.jobs, "worker threads (0 = all logical CPUs)")
        ->capture_default_str();
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"jsonl", "csv", "table"}))
        ->capture_default_str();
    app.add_option("--out", out_path, "write records here instead of stdout");
    app.add_option("--resume", cfg.resume_path,
                   "append-only work log; completed cells are not recomputed");
    app.add_option("--convention", convention,
                   "rotation convention for the second factor")
        ->check(CLI::IsMember({"b_minus", "b_plus"}))
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.convention = convention == "b_plus" ? pqs::RotationConvention::b_plus
                                                : pqs::RotationConvention::b_minus;
        pqs::RunResult result = pqs::run_classification(cfg);

        pqs::OutputFormat fmt = format == "csv"     ? pqs::OutputFormat::csv
                                : format == "table" ? pqs::OutputFormat::table
                                                    : pqs::OutputFormat::jsonl;
        if (out_path.empty()) {
            pqs::emit(result.records, fmt, std::cout);
        } else {
            std::ofstream os(out_path);
            if (!os) throw std::runtime_error("cannot open output file: " + out_path);
            pqs::emit(result.records, fmt, os);
        }

        pqs::RunSummary s = pqs::summarize(result.records);
        std::cerr << "cells: " << result.cells_total;
        if (result.cells_from_resume)
            std::cerr << " (" << result.cells_from_resume << " from work log)";
        std::cerr << "\nrecords: " << s.record_count << " (free: " << s.free_count << ")\n";
        std::cerr << "exact degrees: " << join_degrees(s.exact_degrees);
        if (s.max_exact_degree) std::cerr << " (max " << *s.max_exact_degree << ")";
        std::cerr << "\n";
        for (const auto& [g, c] : s.per_group)
            std::cerr << "  group " << g << ": " << c << "\n";
        if (!result.discards.reasons.empty()) {
            std::cerr << "discards:\n";
            for (const auto& [k, v] : result.discards.reasons)
                std::cerr << "  " << k << ": " << v << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
