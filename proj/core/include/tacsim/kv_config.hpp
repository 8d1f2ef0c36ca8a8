#pragma once

// Flat key-value configuration with [section] headers. Keys are addressed as
// "section.key". '#' and ';' start comment lines.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace tacsim::config {

using KeyValues = std::map<std::string, std::string>;

/// Throws ConfigError on malformed input.
KeyValues parse_kv(const std::string& text);
KeyValues read_kv_file(const std::filesystem::path& path);

/// "section.key=value" -> (key, value). Throws ConfigError.
std::pair<std::string, std::string> parse_override(const std::string& assignment);

/// 64-bit FNV-1a over the canonical "key=value\n" listing (keys sorted).
std::uint64_t config_hash(const KeyValues& kv);
std::string hash_hex(std::uint64_t hash);

/// Comma-separated list of numbers.
std::vector<double> parse_number_list(const std::string& text, const std::string& key);
std::string format_number_list(const std::vector<double>& values);

}  // namespace tacsim::config
