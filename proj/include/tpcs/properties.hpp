#pragma once

#include "tpcs/scxml_compile.hpp"
#include "tpcs/smc.hpp"

#include <string>

namespace tpcs {

/// Model context for resolving property atoms. `model` is optional; without
/// it, (loc …) atoms name raw program-graph locations and string literals
/// cannot be used.
struct PropertyContext {
    const ChannelSystem* cs = nullptr;
    const CompiledModel* model = nullptr;
};

/// Parses a property document:
///   <properties>
///     <property name="..."><formula>(globally 0 inf ...)</formula></property>
///   </properties>
/// Formulas are s-expressions; see docs/properties.md for the grammar.
/// Atoms are registered (and deduplicated) into the returned PropertySet.
PropertySet parse_properties_xml(const std::string& xml_text, const PropertyContext& ctx);
PropertySet parse_properties_file(const std::string& path, const PropertyContext& ctx);

/// Parses one formula, registering its atoms into `set`.
Formula parse_formula(const std::string& text, PropertySet& set, const PropertyContext& ctx);

} // namespace tpcs
