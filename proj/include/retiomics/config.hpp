#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace retiomics {

/// INI-style configuration: `[section]` headers, `key = value` entries,
/// `#`/`;` comments. Section and key order is preserved so a parsed file can
/// be echoed back canonically.
class IniConfig {
public:
    IniConfig() = default;

    static IniConfig parse_file(const std::filesystem::path& path);
    static IniConfig parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;
    std::optional<std::string> find(const std::string& section, const std::string& key) const;

    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& section, const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    /// Comma-separated list; empty value -> empty list.
    std::vector<std::string> get_list(const std::string& section, const std::string& key) const;

    void set(const std::string& section, const std::string& key, const std::string& value);

    bool has_section(const std::string& section) const;
    std::vector<std::string> sections() const;
    std::vector<std::pair<std::string, std::string>> entries(const std::string& section) const;

    std::string dump() const;
    nlohmann::ordered_json to_json() const;

private:
    struct Section {
        std::string name;
        std::vector<std::pair<std::string, std::string>> entries;
    };
    std::vector<Section> sections_;

    const Section* find_section(const std::string& name) const;
    Section& get_or_add_section(const std::string& name);
};

}  // namespace retiomics
