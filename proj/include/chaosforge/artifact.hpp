#pragma once
#include <cstdint>
#include <string>

namespace chaosforge {

inline constexpr const char* kToolVersion = "0.1.0";

// write via temp file + rename so readers never see partial output
void atomic_write(const std::string& path, const std::string& content);

std::string format_g9(double v);  // 9 significant digits

// {"seed":...,"config_hash":"...","tool_version":"..."}
std::string meta_json(uint64_t seed, const std::string& config_hash);

}  // namespace chaosforge
