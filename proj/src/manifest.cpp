#include "tpcs/manifest.hpp"

#include "tpcs/errors.hpp"

#include <json.hpp>

#include <fstream>

namespace tpcs {

namespace {

using nlohmann::json;

Rational json_rational(const json& v, const std::string& what) {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_string()) {
        if (auto r = Rational::parse(v.get<std::string>())) return *r;
    }
    if (v.is_number_float()) {
        if (auto r = Rational::parse(std::to_string(v.get<double>()))) return *r;
    }
    throw ParseError("manifest: bad " + what + " (use an integer or a \"p/q\" string)");
}

} // namespace

Manifest Manifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open manifest " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ParseError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("manifest must be a JSON object");

    Manifest m;
    m.base_dir = path.parent_path();

    if (!doc.contains("automata") || !doc["automata"].is_array() || doc["automata"].empty())
        throw ParseError("manifest needs a non-empty \"automata\" array");
    for (const auto& f : doc["automata"]) {
        if (!f.is_string()) throw ParseError("manifest: automata entries must be file names");
        m.automata_files.push_back(f.get<std::string>());
    }
    if (!doc.contains("properties") || !doc["properties"].is_string())
        throw ParseError("manifest needs a \"properties\" file");
    m.property_file = doc["properties"].get<std::string>();

    if (doc.contains("queue_capacity")) {
        auto c = doc["queue_capacity"];
        if (!c.is_number_unsigned() || c.get<std::uint64_t>() == 0)
            throw ParseError("manifest: queue_capacity must be a positive integer");
        m.compile_options.queue_capacity = c.get<std::size_t>();
    }
    if (doc.contains("time_quantum")) {
        m.compile_options.time_quantum = json_rational(doc["time_quantum"], "time_quantum");
        if (!(Rational(0) < m.compile_options.time_quantum))
            throw ParseError("manifest: time_quantum must be positive");
    }
    if (doc.contains("time_horizon")) {
        auto h = doc["time_horizon"];
        if (!h.is_number_unsigned() || h.get<std::uint64_t>() == 0)
            throw ParseError("manifest: time_horizon must be a positive integer");
        m.compile_options.time_horizon = h.get<std::uint32_t>();
    }
    if (doc.contains("smc")) {
        const auto& s = doc["smc"];
        if (!s.is_object()) throw ParseError("manifest: \"smc\" must be an object");
        if (s.contains("epsilon")) m.smc.epsilon = s["epsilon"].get<double>();
        if (s.contains("delta")) m.smc.delta = s["delta"].get<double>();
        if (s.contains("seed")) m.smc.seed = s["seed"].get<std::uint64_t>();
        if (s.contains("max_samples")) m.smc.max_samples = s["max_samples"].get<std::uint64_t>();
        if (s.contains("max_steps")) m.smc.max_trace_length = s["max_steps"].get<std::uint32_t>();
        if (s.contains("workers")) m.smc.workers = s["workers"].get<unsigned>();
    }

    for (const auto& f : m.automata_files) {
        if (!std::filesystem::exists(m.resolve(f)))
            throw ArgumentError("manifest references missing automaton file " + m.resolve(f).string());
    }
    if (!std::filesystem::exists(m.resolve(m.property_file)))
        throw ArgumentError("manifest references missing property file " +
                            m.resolve(m.property_file).string());
    return m;
}

} // namespace tpcs
