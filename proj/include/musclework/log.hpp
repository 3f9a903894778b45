#pragma once

#include <spdlog/spdlog.h>

namespace musclework {

/// Shared engine logger (stderr). Level comes from MUSCLEWORK_LOG
/// (error|warn|info|debug), default warn.
spdlog::logger& log();

} // namespace musclework
