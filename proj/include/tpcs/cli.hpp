#pragma once

#include "tpcs/manifest.hpp"
#include "tpcs/properties.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace tpcs::cli {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitBudget = 4;

/// Manifest + compiled system + properties, ready to simulate.
struct LoadedModel {
    Manifest manifest;
    CompiledModel model;
    PropertySet props;
};

/// Full load pipeline: manifest → parse → catalog → compile → properties.
LoadedModel load_model(const std::string& manifest_path);

/// Maps a raised error to the exit-code contract: usage errors 1,
/// validation errors 2, runtime model errors 3.
int classify_error(const std::exception& e);

/// Seed override from the SMC_SEED environment variable, if set.
std::optional<std::uint64_t> env_seed();

struct VerifyOptions {
    std::optional<double> epsilon;
    std::optional<double> delta;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::uint64_t> max_samples;
    std::optional<std::uint32_t> max_steps;
    bool json = false;
    std::optional<std::string> emit_model; // path for the compiled-model dump
    std::optional<std::string> output;     // report file; default = stdout
};

/// Parses and validates the model and properties; exit 0 iff clean.
int cmd_validate(const std::string& manifest_path, bool json, std::ostream& out, std::ostream& err);

/// Simulates `count` executions and writes one JSON-lines trace file each.
int cmd_trace(const std::string& manifest_path, std::optional<std::uint64_t> seed,
              std::uint64_t count, const std::string& out_dir,
              std::optional<std::uint32_t> max_steps, std::ostream& out, std::ostream& err);

/// Full pipeline: compile, estimate, report.
int cmd_verify(const std::string& manifest_path, const VerifyOptions& options, std::ostream& out,
               std::ostream& err);

/// The exact bytes cmd_verify writes with --json (stable across runs and
/// worker counts at a fixed seed).
std::string render_report_json(const SmcReport& report);

} // namespace tpcs::cli
