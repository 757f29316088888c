#pragma once

#include "tpcs/scxml_compile.hpp"
#include "tpcs/smc.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace tpcs {

/// Model manifest (JSON): the automata files, the property file, queue
/// capacities, time grid and default verification settings. Paths are
/// resolved relative to the manifest's directory.
struct Manifest {
    std::filesystem::path base_dir;
    std::vector<std::string> automata_files;
    std::string property_file;
    CompileOptions compile_options;
    SmcConfig smc;

    std::filesystem::path resolve(const std::string& file) const { return base_dir / file; }

    /// Loads and validates. Missing files raise ArgumentError; malformed
    /// content raises ParseError.
    static Manifest load(const std::filesystem::path& path);
};

} // namespace tpcs
