#pragma once

#include <json.hpp>

#include <string>

namespace scami {

using Json = nlohmann::ordered_json;

// Shortest of %.17g — every double round-trips and reruns are byte-stable.
std::string format_double(double v);

// Serializer that routes all floating-point values through format_double.
// indent < 0 emits compact output.
std::string dump_json(const Json& j, int indent = -1);

}  // namespace scami
