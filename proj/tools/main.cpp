#include "tpcs/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Statistical model checker for timed probabilistic channel systems "
                 "built from restricted SCXML state charts"};
    app.require_subcommand(1);

    std::string manifest;
    bool json_output = false;

    auto* validate = app.add_subcommand("validate", "Parse and validate a model and its properties");
    validate->add_option("manifest", manifest, "Model manifest (JSON)")->required();
    validate->add_flag("--json", json_output, "Machine-readable diagnostics");

    std::uint64_t trace_count = 1;
    std::string trace_out = ".";
    std::optional<std::uint64_t> seed_flag;
    std::optional<std::uint32_t> max_steps_flag;
    auto* trace = app.add_subcommand("trace", "Simulate executions and export JSONL traces");
    trace->add_option("manifest", manifest, "Model manifest (JSON)")->required();
    trace->add_option("--count", trace_count, "Number of traces to produce");
    trace->add_option("--out", trace_out, "Output directory");
    trace->add_option_function<std::uint64_t>(
        "--seed", [&seed_flag](const std::uint64_t& s) { seed_flag = s; }, "Seed override");
    trace->add_option_function<std::uint32_t>(
        "--max-steps", [&max_steps_flag](const std::uint32_t& s) { max_steps_flag = s; },
        "Trace length cap");

    tpcs::cli::VerifyOptions vo;
    auto* verify = app.add_subcommand("verify", "Estimate the probability of each property");
    verify->add_option("manifest", manifest, "Model manifest (JSON)")->required();
    verify->add_option_function<double>(
        "--epsilon", [&vo](const double& v) { vo.epsilon = v; }, "Precision in (0, 1/2)");
    verify->add_option_function<double>(
        "--delta", [&vo](const double& v) { vo.delta = v; }, "1 - confidence, in (0, 1)");
    verify->add_option_function<std::uint64_t>(
        "--seed", [&vo](const std::uint64_t& v) { vo.seed = v; }, "Seed override");
    verify->add_option_function<unsigned>(
        "--workers", [&vo](const unsigned& v) { vo.workers = v; }, "Parallel trial executors");
    verify->add_option_function<std::uint64_t>(
        "--max-samples", [&vo](const std::uint64_t& v) { vo.max_samples = v; }, "Sample budget");
    verify->add_option_function<std::uint32_t>(
        "--max-steps", [&vo](const std::uint32_t& v) { vo.max_steps = v; }, "Trace length cap");
    verify->add_flag("--json", vo.json, "JSON report");
    verify->add_option_function<std::string>(
        "--emit-model", [&vo](const std::string& v) { vo.emit_model = v; },
        "Dump the compiled model as JSON to this file ('-' for stdout)");
    verify->add_option_function<std::string>(
        "--output", [&vo](const std::string& v) { vo.output = v; },
        "Write the report to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : tpcs::cli::kExitUsage;
    }

    try {
        if (validate->parsed())
            return tpcs::cli::cmd_validate(manifest, json_output, std::cout, std::cerr);
        if (trace->parsed())
            return tpcs::cli::cmd_trace(manifest, seed_flag, trace_count, trace_out, max_steps_flag,
                                        std::cout, std::cerr);
        return tpcs::cli::cmd_verify(manifest, vo, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return tpcs::cli::classify_error(e);
    }
}
