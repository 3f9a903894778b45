#include "musclework/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>

#include <cstdlib>
#include <string>

namespace musclework {

namespace {

spdlog::level::level_enum level_from_env() {
  const char* env = std::getenv("MUSCLEWORK_LOG");
  if (env == nullptr) return spdlog::level::warn;
  const std::string v(env);
  if (v == "error") return spdlog::level::err;
  if (v == "warn") return spdlog::level::warn;
  if (v == "info") return spdlog::level::info;
  if (v == "debug") return spdlog::level::debug;
  return spdlog::level::warn;
}

} // namespace

spdlog::logger& log() {
  static std::shared_ptr<spdlog::logger> logger = [] {
    auto l = spdlog::stderr_color_mt("musclework");
    l->set_level(level_from_env());
    l->set_pattern("[%l] %v");
    return l;
  }();
  return *logger;
}

} // namespace musclework
