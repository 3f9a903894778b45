#pragma once

#include <string>

namespace musclework {

/// Formats with 9 significant digits ("%.9g"). All text outputs go through
/// this so files are byte-reproducible.
std::string fmt9(double v);

/// Rounds to the value printed by fmt9, for JSON documents whose serializer
/// emits the shortest round-trip representation.
double round9(double v);

} // namespace musclework
