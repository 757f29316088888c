#include "tpcs/value.hpp"

namespace tpcs {

std::string Value::str() const {
    switch (kind()) {
    case Kind::Boolean:
        return as_bool() ? "true" : "false";
    case Kind::Integer:
        return std::to_string(as_int());
    case Kind::Rational:
        return as_rational().str();
    case Kind::Tuple: {
        std::string out = "(";
        const auto& elems = as_tuple();
        for (std::size_t i = 0; i < elems.size(); ++i) {
            if (i > 0) out += ", ";
            out += elems[i].str();
        }
        out += ")";
        return out;
    }
    }
    return {};
}

bool VarDomain::contains(const Value& v) const {
    switch (kind_) {
    case Kind::Boolean:
        return v.is_bool();
    case Kind::BoundedInt:
        return v.is_int() && v.as_int() >= lo_ && v.as_int() <= hi_;
    case Kind::Rational:
        return v.is_numeric();
    case Kind::Tuple: {
        if (!v.is_tuple()) return false;
        const auto& elems = v.as_tuple();
        if (elems.size() != parts_.size()) return false;
        for (std::size_t i = 0; i < elems.size(); ++i) {
            if (!parts_[i].contains(elems[i])) return false;
        }
        return true;
    }
    }
    return false;
}

bool VarDomain::is_finite() const {
    switch (kind_) {
    case Kind::Boolean:
    case Kind::BoundedInt:
        return true;
    case Kind::Rational:
        return false;
    case Kind::Tuple:
        for (const auto& p : parts_) {
            if (!p.is_finite()) return false;
        }
        return true;
    }
    return false;
}

std::uint64_t VarDomain::cardinality() const {
    switch (kind_) {
    case Kind::Boolean:
        return 2;
    case Kind::BoundedInt: {
        unsigned __int128 n = static_cast<unsigned __int128>(hi_ - lo_) + 1;
        if (n > UINT64_MAX) throw ModelError("domain too large to enumerate");
        return static_cast<std::uint64_t>(n);
    }
    case Kind::Rational:
        throw ModelError("rational domain is not enumerable");
    case Kind::Tuple: {
        unsigned __int128 n = 1;
        for (const auto& p : parts_) {
            n *= p.cardinality();
            if (n > UINT64_MAX) throw ModelError("domain too large to enumerate");
        }
        return static_cast<std::uint64_t>(n);
    }
    }
    return 0;
}

void VarDomain::enumerate(const std::function<void(const Value&)>& fn) const {
    switch (kind_) {
    case Kind::Boolean:
        fn(Value(false));
        fn(Value(true));
        return;
    case Kind::BoundedInt:
        for (std::int64_t i = lo_;; ++i) {
            fn(Value(i));
            if (i == hi_) break;
        }
        return;
    case Kind::Rational:
        throw ModelError("rational domain is not enumerable");
    case Kind::Tuple: {
        std::vector<Value> current(parts_.size());
        std::function<void(std::size_t)> rec = [&](std::size_t idx) {
            if (idx == parts_.size()) {
                fn(Value::tuple(current));
                return;
            }
            parts_[idx].enumerate([&](const Value& v) {
                current[idx] = v;
                rec(idx + 1);
            });
        };
        rec(0);
        return;
    }
    }
}

std::string VarDomain::str() const {
    switch (kind_) {
    case Kind::Boolean:
        return "bool";
    case Kind::BoundedInt:
        return "int[" + std::to_string(lo_) + "," + std::to_string(hi_) + "]";
    case Kind::Rational:
        return "rational";
    case Kind::Tuple: {
        std::string out = "tuple(";
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (i > 0) out += ", ";
            out += parts_[i].str();
        }
        out += ")";
        return out;
    }
    }
    return {};
}

} // namespace tpcs
