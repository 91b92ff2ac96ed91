#include "wnfdi/config.hpp"

#include "wnfdi/errors.hpp"
#include "wnfdi/random.hpp"
#include "textio.hpp"

namespace wnfdi {

namespace tio = textio;

ConfigFile ConfigFile::parse(const std::string& path) {
  return parse_text(tio::read_file(path), path);
}

ConfigFile ConfigFile::parse_text(const std::string& text,
                                  const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  cfg.hash_ = fnv1a64(text.data(), text.size());
  cfg.sections_.push_back({"", {}});  // top-level (unnamed) section
  Section* current = &cfg.sections_.back();

  int number = 0;
  for (std::string_view raw : tio::split_lines(text)) {
    ++number;
    std::string_view line = tio::trim(tio::strip_comment(raw, "#"));
    if (line.empty()) continue;
    if (line.front() == '[') {
      std::size_t close = line.find(']');
      if (close == std::string_view::npos)
        throw validation_error(origin + ":" + tio::fmt(number) +
                               ": unterminated section header");
      cfg.sections_.push_back({std::string(line.substr(1, close - 1)), {}});
      current = &cfg.sections_.back();
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw validation_error(origin + ":" + tio::fmt(number) +
                             ": expected 'key = value'");
    Entry e;
    e.key = std::string(tio::trim(line.substr(0, eq)));
    e.value = std::string(tio::trim(line.substr(eq + 1)));
    if (e.key.empty())
      throw validation_error(origin + ":" + tio::fmt(number) + ": empty key");
    current->entries.push_back(std::move(e));
  }
  return cfg;
}

const std::string* ConfigFile::find(const std::string& section,
                                    const std::string& key) const {
  for (const Section& s : sections_) {
    if (s.name != section) continue;
    for (const Entry& e : s.entries)
      if (e.key == key) return &e.value;
  }
  return nullptr;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string ConfigFile::get_string(const std::string& section,
                                   const std::string& key) const {
  const std::string* v = find(section, key);
  if (v == nullptr)
    throw validation_error(origin_ + ": missing required key [" + section +
                           "] " + key);
  return *v;
}

std::string ConfigFile::get_string_or(const std::string& section,
                                      const std::string& key,
                                      const std::string& fallback) const {
  const std::string* v = find(section, key);
  return v != nullptr ? *v : fallback;
}

double ConfigFile::get_double_or(const std::string& section,
                                 const std::string& key,
                                 double fallback) const {
  const std::string* v = find(section, key);
  if (v == nullptr) return fallback;
  double out;
  if (!tio::parse_double(*v, out))
    throw validation_error(origin_ + ": [" + section + "] " + key +
                           " is not a number: '" + *v + "'");
  return out;
}

int ConfigFile::get_int_or(const std::string& section, const std::string& key,
                           int fallback) const {
  const std::string* v = find(section, key);
  if (v == nullptr) return fallback;
  int out;
  if (!tio::parse_int(*v, out))
    throw validation_error(origin_ + ": [" + section + "] " + key +
                           " is not an integer: '" + *v + "'");
  return out;
}

std::uint64_t ConfigFile::get_u64_or(const std::string& section,
                                     const std::string& key,
                                     std::uint64_t fallback) const {
  const std::string* v = find(section, key);
  if (v == nullptr) return fallback;
  std::uint64_t out;
  if (!tio::parse_u64(*v, out))
    throw validation_error(origin_ + ": [" + section + "] " + key +
                           " is not an unsigned integer: '" + *v + "'");
  return out;
}

bool ConfigFile::get_bool_or(const std::string& section,
                             const std::string& key, bool fallback) const {
  const std::string* v = find(section, key);
  if (v == nullptr) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw validation_error(origin_ + ": [" + section + "] " + key +
                         " is not a boolean: '" + *v + "'");
}

std::vector<double> ConfigFile::get_doubles(const std::string& section,
                                            const std::string& key) const {
  const std::string* v = find(section, key);
  std::vector<double> out;
  if (v == nullptr) return out;
  for (auto f : tio::split_ws(*v)) {
    double d;
    if (!tio::parse_double(f, d))
      throw validation_error(origin_ + ": [" + section + "] " + key +
                             " has a non-numeric element: '" + std::string(f) +
                             "'");
    out.push_back(d);
  }
  return out;
}

std::vector<int> ConfigFile::get_ints(const std::string& section,
                                      const std::string& key) const {
  const std::string* v = find(section, key);
  std::vector<int> out;
  if (v == nullptr) return out;
  for (auto f : tio::split_ws(*v)) {
    int d;
    if (!tio::parse_int(f, d))
      throw validation_error(origin_ + ": [" + section + "] " + key +
                             " has a non-integer element: '" + std::string(f) +
                             "'");
    out.push_back(d);
  }
  return out;
}

std::uint64_t file_fnv(const std::string& path) {
  std::string data = tio::read_file(path);
  return fnv1a64(data.data(), data.size());
}

}  // namespace wnfdi
