#pragma once

#include <json.hpp>

namespace aeroreact {

// Insertion-ordered so serialized records keep their documented key order.
using Json = nlohmann::ordered_json;

}  // namespace aeroreact
