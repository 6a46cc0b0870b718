#pragma once

#include "json.hpp"

#include "qcsync/harness.h"

namespace qcsync::harness {

// Full report including the message log. Doubles are written as shortest
// round-trip decimals, so equal dumps mean bit-identical reports.
nlohmann::ordered_json to_json(const RunReport& r);
nlohmann::ordered_json to_json(const ClassicalMessage& m);

}  // namespace qcsync::harness
