#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wnfdi {

// Line-oriented configuration: '[section]' headers, 'key = value' entries,
// '#' comments. Values may be lists (whitespace separated). The FNV-1a hash
// of the raw file bytes is kept for provenance stamping.
class ConfigFile {
 public:
  struct Entry {
    std::string key;
    std::string value;
  };
  struct Section {
    std::string name;
    std::vector<Entry> entries;
  };

  static ConfigFile parse(const std::string& path);
  static ConfigFile parse_text(const std::string& text,
                               const std::string& origin = "<memory>");

  bool has(const std::string& section, const std::string& key) const;

  // Typed getters; the *_or forms fall back to a default when the key is
  // absent. Malformed values throw validation_error naming the key.
  std::string get_string(const std::string& section,
                         const std::string& key) const;
  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const;
  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const;
  int get_int_or(const std::string& section, const std::string& key,
                 int fallback) const;
  std::uint64_t get_u64_or(const std::string& section, const std::string& key,
                           std::uint64_t fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key,
                   bool fallback) const;
  std::vector<double> get_doubles(const std::string& section,
                                  const std::string& key) const;
  std::vector<int> get_ints(const std::string& section,
                            const std::string& key) const;

  const std::vector<Section>& sections() const { return sections_; }
  std::uint64_t hash() const { return hash_; }
  const std::string& origin() const { return origin_; }

 private:
  const std::string* find(const std::string& section,
                          const std::string& key) const;

  std::vector<Section> sections_;
  std::uint64_t hash_ = 0;
  std::string origin_;
};

// FNV-1a hash of a file's bytes.
std::uint64_t file_fnv(const std::string& path);

}  // namespace wnfdi
