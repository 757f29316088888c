#include "tpcs/cli.hpp"

#include "tpcs/errors.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace tpcs::cli {

namespace {

using nlohmann::json;

json value_to_json(const Value& v, const EventCatalog& cat, std::optional<SurfaceType> type) {
    switch (v.kind()) {
    case Value::Kind::Boolean:
        return v.as_bool();
    case Value::Kind::Integer:
        if (type && *type == SurfaceType::Str) {
            auto id = static_cast<std::size_t>(v.as_int());
            if (id < cat.strings.size()) return cat.strings[id];
        }
        return v.as_int();
    case Value::Kind::Rational: {
        const Rational& r = v.as_rational();
        if (r.is_integer()) return r.num();
        return r.str();
    }
    case Value::Kind::Tuple: {
        json arr = json::array();
        for (const auto& e : v.as_tuple()) arr.push_back(value_to_json(e, cat, {}));
        return arr;
    }
    }
    return nullptr;
}

json observation_to_json(const LoadedModel& lm, const EventRecord& ev, const Rational& t) {
    const EventCatalog& cat = lm.model.catalog;
    const ChannelSystem& cs = lm.model.cs;
    json line;
    line["t"] = t.str();
    if (ev.kind == EventKind::Internal && !ev.channel && !ev.action) {
        line["kind"] = "init";
        return line;
    }
    if (ev.kind == EventKind::Internal && !ev.channel) {
        line["kind"] = "internal";
        if (ev.source_pg) {
            line["pg"] = cs.pgs()[*ev.source_pg].name;
            if (ev.action) line["action"] = cs.pgs()[*ev.source_pg].actions[*ev.action];
        }
        return line;
    }
    switch (ev.kind) {
    case EventKind::Send: line["kind"] = "send"; break;
    case EventKind::Receive: line["kind"] = "receive"; break;
    case EventKind::Handshake: line["kind"] = "handshake"; break;
    case EventKind::Internal: line["kind"] = "internal"; break; // emptiness probe
    }
    if (!ev.channel) return line;
    const ChannelId ch = *ev.channel;
    line["channel"] = cs.channels()[ch].name;
    if (ch >= lm.model.channel_roles.size() || !ev.payload) return line;
    const ChannelRole& role = lm.model.channel_roles[ch];
    switch (role.kind) {
    case ChannelRole::Kind::InternalQueue:
        if (ev.payload->is_int()) {
            auto id = static_cast<std::size_t>(ev.payload->as_int());
            if (id < cat.events.size()) line["event"] = cat.events[id].name;
        }
        line["origin"] = cat.automata[role.automaton];
        line["target"] = cat.automata[role.automaton];
        break;
    case ChannelRole::Kind::ExternalQueue:
        if (ev.payload->is_tuple() && ev.payload->as_tuple().size() == 2) {
            const auto& pair = ev.payload->as_tuple();
            auto eid = static_cast<std::size_t>(pair[0].as_int());
            auto oid = static_cast<std::size_t>(pair[1].as_int());
            if (eid < cat.events.size()) line["event"] = cat.events[eid].name;
            if (oid < cat.automata.size()) line["origin"] = cat.automata[oid];
        }
        line["target"] = cat.automata[role.automaton];
        break;
    case ChannelRole::Kind::ParamQueue: {
        line["event"] = cat.events[role.event].name;
        line["origin"] = cat.automata[role.origin];
        line["target"] = cat.automata[role.automaton];
        json params = json::array();
        if (ev.payload->is_tuple()) {
            const auto& elems = ev.payload->as_tuple();
            const auto& sig = cat.events[role.event].params;
            for (std::size_t i = 0; i < elems.size(); ++i) {
                std::optional<SurfaceType> type;
                if (i < sig.size()) type = sig[i].type;
                params.push_back(value_to_json(elems[i], cat, type));
            }
        }
        line["params"] = std::move(params);
        break;
    }
    }
    return line;
}

json model_summary(const LoadedModel& lm) {
    const ChannelSystem& cs = lm.model.cs;
    json automata = json::array();
    for (const auto& pg : cs.pgs()) {
        automata.push_back({{"name", pg.name},
                            {"locations", pg.locations.size()},
                            {"transitions", pg.transitions.size()},
                            {"variables", pg.variables.size()},
                            {"clocks", pg.clocks.size()}});
    }
    json channels = json::array();
    for (const auto& c : cs.channels()) {
        json jc = {{"name", c.name},
                   {"capacity", c.capacity},
                   {"receiver", cs.pgs()[c.receiver].name}};
        jc["sender"] = c.sender ? json(cs.pgs()[*c.sender].name) : json(nullptr);
        channels.push_back(std::move(jc));
    }
    json events = json::array();
    for (std::size_t i = 0; i < lm.model.catalog.events.size(); ++i) {
        const auto& e = lm.model.catalog.events[i];
        json names = json::array();
        for (const auto& p : e.params) names.push_back(p.name);
        events.push_back({{"id", i}, {"name", e.name}, {"params", std::move(names)}});
    }
    return {{"automata", std::move(automata)},
            {"channels", std::move(channels)},
            {"events", std::move(events)},
            {"properties", lm.props.properties.size()}};
}

} // namespace

int classify_error(const std::exception& e) {
    if (dynamic_cast<const ArgumentError*>(&e) || dynamic_cast<const ContractError*>(&e))
        return kExitUsage;
    if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const CatalogError*>(&e) ||
        dynamic_cast<const PropertyError*>(&e))
        return kExitValidation;
    return kExitRuntime;
}

std::optional<std::uint64_t> env_seed() {
    const char* v = std::getenv("SMC_SEED");
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    unsigned long long parsed = std::strtoull(v, &end, 10);
    if (end == v || *end != '\0') throw ArgumentError("SMC_SEED must be an unsigned integer");
    return static_cast<std::uint64_t>(parsed);
}

LoadedModel load_model(const std::string& manifest_path) {
    Manifest manifest = Manifest::load(manifest_path);
    std::vector<ScxmlAutomaton> automata;
    automata.reserve(manifest.automata_files.size());
    for (const auto& f : manifest.automata_files)
        automata.push_back(parse_scxml_file(manifest.resolve(f).string()));
    CompiledModel model = compile(automata, manifest.compile_options);
    PropertyContext ctx{&model.cs, &model};
    PropertySet props = parse_properties_file(manifest.resolve(manifest.property_file).string(), ctx);
    props.check(model.cs);
    return LoadedModel{std::move(manifest), std::move(model), std::move(props)};
}

int cmd_validate(const std::string& manifest_path, bool json_output, std::ostream& out,
                 std::ostream& err) {
    try {
        LoadedModel lm = load_model(manifest_path);
        if (json_output) {
            json ok = {{"status", "ok"}, {"model", model_summary(lm)}};
            out << ok.dump(2) << "\n";
        } else {
            out << "ok: " << lm.model.cs.pgs().size() << " automata, " << lm.model.cs.channels().size()
                << " channels, " << lm.props.properties.size() << " properties\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        if (json_output) {
            json bad = {{"status", "error"},
                        {"diagnostics", json::array({json{{"severity", "error"}, {"message", e.what()}}})}};
            out << bad.dump(2) << "\n";
        }
        err << "error: " << e.what() << "\n";
        return classify_error(e);
    }
}

int cmd_trace(const std::string& manifest_path, std::optional<std::uint64_t> seed, std::uint64_t count,
              const std::string& out_dir, std::optional<std::uint32_t> max_steps, std::ostream& out,
              std::ostream& err) {
    std::optional<LoadedModel> loaded;
    try {
        loaded = load_model(manifest_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return classify_error(e);
    }
    LoadedModel& lm = *loaded;
    SmcConfig cfg = lm.manifest.smc;
    if (auto env = env_seed()) cfg.seed = *env;
    if (seed) cfg.seed = *seed;
    if (max_steps) cfg.max_trace_length = *max_steps;

    std::filesystem::create_directories(out_dir);
    auto initials = cs_initial_states(lm.model.cs);
    Resolver resolver = uniform_resolver();

    for (std::uint64_t k = 0; k < count; ++k) {
        std::filesystem::path file =
            std::filesystem::path(out_dir) / ("trace_" + std::to_string(k) + ".jsonl");
        std::ofstream os(file, std::ios::binary);
        if (!os) {
            err << "error: cannot write " << file.string() << "\n";
            return kExitUsage;
        }
        Rng rng = Rng::child(cfg.seed, k);
        CsState state = initials[rng.next_below(initials.size())];
        Rational now(0);
        try {
            for (std::uint32_t step = 0; step < cfg.max_trace_length; ++step) {
                CsStep s = cs_step(lm.model.cs, state, now, rng, resolver);
                if (s.status != CsStep::Status::Stepped) break;
                state = std::move(s.state);
                now = s.now;
                os << observation_to_json(lm, s.event, now).dump() << "\n";
            }
        } catch (const ModelError& e) {
            os << json{{"error", e.what()}}.dump() << "\n";
            err << "error: " << e.what() << "\n";
            return kExitRuntime;
        }
        out << file.string() << "\n";
    }
    return kExitOk;
}

std::string render_report_json(const SmcReport& report) {
    json props = json::array();
    for (const auto& p : report.properties) {
        props.push_back({{"name", p.name},
                         {"samples", p.samples},
                         {"successes", p.successes},
                         {"inconclusive", p.inconclusive},
                         {"inconclusive_flagged", p.inconclusive_flagged},
                         {"bound_met", p.bound_met},
                         {"estimate", p.estimate},
                         {"interval", json::array({p.interval_lo, p.interval_hi})}});
    }
    json out = {{"seed", report.seed},
                {"epsilon", report.epsilon},
                {"delta", report.delta},
                {"confidence", report.confidence},
                {"total_trials", report.total_trials},
                {"budget_exhausted", report.budget_exhausted},
                {"properties", std::move(props)}};
    return out.dump(2) + "\n";
}

int cmd_verify(const std::string& manifest_path, const VerifyOptions& options, std::ostream& out,
               std::ostream& err) {
    std::optional<LoadedModel> loaded;
    try {
        loaded = load_model(manifest_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return classify_error(e);
    }
    LoadedModel& lm = *loaded;

    SmcConfig cfg = lm.manifest.smc;
    try {
        if (auto env = env_seed()) cfg.seed = *env;
        if (options.epsilon) cfg.epsilon = *options.epsilon;
        if (options.delta) cfg.delta = *options.delta;
        if (options.seed) cfg.seed = *options.seed;
        if (options.workers) cfg.workers = *options.workers;
        if (options.max_samples) cfg.max_samples = *options.max_samples;
        if (options.max_steps) cfg.max_trace_length = *options.max_steps;
        cfg.validate();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    if (options.emit_model) {
        std::string dump = model_summary(lm).dump(2) + "\n";
        if (*options.emit_model == "-") {
            out << dump;
        } else {
            std::ofstream os(*options.emit_model, std::ios::binary);
            if (!os) {
                err << "error: cannot write " << *options.emit_model << "\n";
                return kExitUsage;
            }
            os << dump;
        }
    }

    SmcReport report;
    try {
        report = estimate(lm.model.cs, lm.props, cfg);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return classify_error(e);
    }

    std::string rendered;
    if (options.json) {
        rendered = render_report_json(report);
    } else {
        std::ostringstream table;
        table << std::left << std::setw(24) << "property" << std::right << std::setw(10) << "samples"
              << std::setw(11) << "successes" << std::setw(13) << "inconclusive" << std::setw(10)
              << "estimate" << "  interval\n";
        for (const auto& p : report.properties) {
            std::ostringstream interval;
            interval << "[" << std::setprecision(6) << p.interval_lo << ", " << p.interval_hi << "]";
            table << std::left << std::setw(24) << p.name << std::right << std::setw(10) << p.samples
                  << std::setw(11) << p.successes << std::setw(13) << p.inconclusive << std::setw(10)
                  << std::setprecision(6) << p.estimate << "  " << interval.str()
                  << (p.bound_met ? "" : "  (budget exhausted)") << "\n";
        }
        table << "seed " << report.seed << "  epsilon " << report.epsilon << "  delta " << report.delta
              << "  confidence " << report.confidence << "  trials " << report.total_trials << "  wall "
              << std::setprecision(3) << report.wall_seconds << "s\n";
        rendered = table.str();
    }

    if (options.output && *options.output != "-") {
        std::ofstream os(*options.output, std::ios::binary);
        if (!os) {
            err << "error: cannot write " << *options.output << "\n";
            return kExitUsage;
        }
        os << rendered;
    } else {
        out << rendered;
    }
    return report.budget_exhausted ? kExitBudget : kExitOk;
}

} // namespace tpcs::cli
