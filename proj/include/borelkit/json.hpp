#pragma once

// Single include point for the vendored nlohmann/json header.
#include <json.hpp>

namespace borelkit {
using Json = nlohmann::ordered_json;
}
