#include "tpcs/labels.hpp"

#include "tpcs/errors.hpp"

#include <algorithm>

namespace tpcs {

AtomDef AtomDef::location(std::string name, std::uint32_t pg, std::vector<LocationId> locs) {
    AtomDef a(Kind::Location, std::move(name));
    a.pg_ = pg;
    a.locations_ = std::move(locs);
    std::sort(a.locations_.begin(), a.locations_.end());
    return a;
}

AtomDef AtomDef::guard(std::string name, Expr expr) {
    AtomDef a(Kind::Guard, std::move(name));
    a.expr_ = std::move(expr);
    return a;
}

AtomDef AtomDef::event(std::string name, ChannelId channel, std::optional<std::uint32_t> element,
                       std::optional<std::pair<Cmp, Value>> compare) {
    AtomDef a(Kind::Event, std::move(name));
    a.channel_ = channel;
    a.element_ = element;
    a.compare_ = std::move(compare);
    return a;
}

namespace {

bool compare_values(AtomDef::Cmp op, const Value& lhs, const Value& rhs) {
    switch (op) {
    case AtomDef::Cmp::Eq: return lhs == rhs;
    case AtomDef::Cmp::Ne: return lhs != rhs;
    case AtomDef::Cmp::Lt: return lhs.as_numeric() < rhs.as_numeric();
    case AtomDef::Cmp::Le: return lhs.as_numeric() <= rhs.as_numeric();
    case AtomDef::Cmp::Gt: return lhs.as_numeric() > rhs.as_numeric();
    case AtomDef::Cmp::Ge: return lhs.as_numeric() >= rhs.as_numeric();
    }
    return false;
}

} // namespace

bool AtomDef::eval(const ChannelSystem& cs, const CsState& state, const EventRecord& event) const {
    switch (kind_) {
    case Kind::Location:
        return std::binary_search(locations_.begin(), locations_.end(), state.locations.at(pg_));
    case Kind::Guard:
        return expr_.eval(state.valuation).as_bool();
    case Kind::Event: {
        if (!event.channel || *event.channel != channel_) return false;
        if (event.kind == EventKind::Internal) return false; // probes carry no data
        if (!compare_) return true;
        if (!event.payload) return false;
        const Value* subject = &*event.payload;
        if (element_) {
            if (!subject->is_tuple() || *element_ >= subject->as_tuple().size()) return false;
            subject = &subject->as_tuple()[*element_];
        }
        return compare_values(compare_->first, *subject, compare_->second);
    }
    }
    (void)cs;
    return false;
}

void AtomDef::check(const ChannelSystem& cs) const {
    switch (kind_) {
    case Kind::Location:
        if (pg_ >= cs.pgs().size()) throw PropertyError("atom '" + name_ + "' names an unknown graph");
        for (LocationId l : locations_) {
            if (l >= cs.pgs()[pg_].locations.size())
                throw PropertyError("atom '" + name_ + "' names an unknown location");
        }
        return;
    case Kind::Guard:
        if (expr_.check(cs.global_domains()).kind != ExprType::Kind::Bool)
            throw PropertyError("atom '" + name_ + "' is not a boolean predicate");
        return;
    case Kind::Event:
        if (channel_ >= cs.channels().size())
            throw PropertyError("atom '" + name_ + "' references an undeclared channel");
        return;
    }
}

std::vector<std::uint32_t> eval_labels(const ChannelSystem& cs, std::span<const AtomDef> atoms,
                                       const CsState& state, const EventRecord& event) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].eval(cs, state, event)) out.push_back(i);
    }
    return out;
}

} // namespace tpcs
