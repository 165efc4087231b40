#include "chaosforge/artifact.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace chaosforge {

void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out.write(content.data(), static_cast<long>(content.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("rename failed for " + path);
    }
}

std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
}

std::string meta_json(uint64_t seed, const std::string& config_hash) {
    return "{\"seed\":" + std::to_string(seed) + ",\"config_hash\":\"" + config_hash +
           "\",\"tool_version\":\"" + kToolVersion + "\"}";
}

}  // namespace chaosforge
