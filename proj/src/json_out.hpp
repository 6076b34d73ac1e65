#pragma once

#include <json.hpp>

#include <string>

namespace bgk {

// %.17g, round-trip exact.
std::string format_double(double v);

// Pretty JSON with 17-significant-digit floats; non-finite values become null.
std::string dump_json(const nlohmann::json& j, int indent = 2);

}  // namespace bgk
