#include "crowder/types.hpp"

#include "crowder/errors.hpp"

namespace crowder {

const std::string* Record::attribute(const std::string& name) const
{
    for (const auto& [key, value] : attributes)
        if (key == name)
            return &value;
    return nullptr;
}

IdPair::IdPair(RecordId x, RecordId y)
{
    if (y < x)
        std::swap(x, y);
    a = std::move(x);
    b = std::move(y);
}

JoinMode parse_join_mode(const std::string& s)
{
    if (s == "self")
        return JoinMode::Self;
    if (s == "cross")
        return JoinMode::Cross;
    throw ConfigError("unknown join mode '" + s + "' (expected self or cross)");
}

std::string to_string(JoinMode m)
{
    return m == JoinMode::Self ? "self" : "cross";
}

}  // namespace crowder
