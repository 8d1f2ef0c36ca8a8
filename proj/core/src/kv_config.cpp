#include "tacsim/kv_config.hpp"

#include <fstream>
#include <sstream>

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "tacsim/errors.hpp"

namespace tacsim::config {

namespace pt = boost::property_tree;

KeyValues parse_kv(const std::string& text) {
  // ini_parser only knows ';' comments.
  std::istringstream raw(text);
  std::ostringstream cleaned;
  std::string line;
  while (std::getline(raw, line)) {
    const std::string trimmed = boost::algorithm::trim_copy(line);
    if (!trimmed.empty() && trimmed.front() == '#') continue;
    cleaned << line << '\n';
  }
  pt::ptree tree;
  std::istringstream in(cleaned.str());
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("line {}: {}", e.line(), e.message()));
  }
  KeyValues kv;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      kv[name] = node.data();
      continue;
    }
    for (const auto& [key, leaf] : node) kv[name + "." + key] = leaf.data();
  }
  return kv;
}

KeyValues read_kv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_kv(ss.str());
}

std::pair<std::string, std::string> parse_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
  std::string key = boost::algorithm::trim_copy(assignment.substr(0, eq));
  std::string value = boost::algorithm::trim_copy(assignment.substr(eq + 1));
  if (key.empty()) throw ConfigError("override '" + assignment + "' has an empty key");
  return {std::move(key), std::move(value)};
}

std::uint64_t config_hash(const KeyValues& kv) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [k, v] : kv) feed(k + "=" + v + "\n");
  return h;
}

std::string hash_hex(std::uint64_t hash) { return fmt::format("{:016x}", hash); }

std::vector<double> parse_number_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = boost::algorithm::trim_copy(item);
    if (t.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) throw ConfigError("bad number '" + t + "' in " + key);
    out.push_back(v);
  }
  return out;
}

std::string format_number_list(const std::vector<double>& values) {
  return fmt::format("{}", fmt::join(values, ","));
}

}  // namespace tacsim::config
