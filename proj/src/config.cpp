#include "retiomics/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "retiomics/common.hpp"

namespace retiomics {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

}  // namespace

IniConfig IniConfig::parse_string(const std::string& text, const std::string& origin) {
    IniConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string current;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // strip comments (not inside values: values keep '#' only if escaped; keep simple, comments start a token)
        std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw UsageError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
            }
            current = trim(line.substr(1, line.size() - 2));
            if (current.empty()) {
                throw UsageError(origin + ":" + std::to_string(lineno) + ": empty section name");
            }
            cfg.get_or_add_section(current);
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw UsageError(origin + ":" + std::to_string(lineno) + ": empty key");
        }
        cfg.set(current, key, value);
    }
    return cfg;
}

IniConfig IniConfig::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path.string());
}

const IniConfig::Section* IniConfig::find_section(const std::string& name) const {
    for (const auto& s : sections_) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

IniConfig::Section& IniConfig::get_or_add_section(const std::string& name) {
    for (auto& s : sections_) {
        if (s.name == name) return s;
    }
    sections_.push_back({name, {}});
    return sections_.back();
}

bool IniConfig::has(const std::string& section, const std::string& key) const {
    return find(section, key).has_value();
}

std::optional<std::string> IniConfig::find(const std::string& section, const std::string& key) const {
    const Section* s = find_section(section);
    if (!s) return std::nullopt;
    for (const auto& [k, v] : s->entries) {
        if (k == key) return v;
    }
    return std::nullopt;
}

std::string IniConfig::get(const std::string& section, const std::string& key) const {
    auto v = find(section, key);
    if (!v) throw UsageError("config: missing required key [" + section + "] " + key);
    return *v;
}

std::string IniConfig::get_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const {
    auto v = find(section, key);
    return v ? *v : fallback;
}

double IniConfig::get_double(const std::string& section, const std::string& key, double fallback) const {
    auto v = find(section, key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        double d = std::stod(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("");
        return d;
    } catch (const std::exception&) {
        throw UsageError("config: [" + section + "] " + key + " is not a number: '" + *v + "'");
    }
}

std::int64_t IniConfig::get_int(const std::string& section, const std::string& key,
                                std::int64_t fallback) const {
    auto v = find(section, key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        long long i = std::stoll(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("");
        return i;
    } catch (const std::exception&) {
        throw UsageError("config: [" + section + "] " + key + " is not an integer: '" + *v + "'");
    }
}

bool IniConfig::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    auto v = find(section, key);
    if (!v) return fallback;
    if (*v == "on" || *v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "off" || *v == "false" || *v == "0" || *v == "no") return false;
    throw UsageError("config: [" + section + "] " + key + " is not a boolean: '" + *v + "'");
}

std::vector<std::string> IniConfig::get_list(const std::string& section, const std::string& key) const {
    auto v = find(section, key);
    std::vector<std::string> out;
    if (!v || v->empty()) return out;
    std::istringstream in(*v);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void IniConfig::set(const std::string& section, const std::string& key, const std::string& value) {
    Section& s = get_or_add_section(section);
    for (auto& [k, v] : s.entries) {
        if (k == key) {
            v = value;
            return;
        }
    }
    s.entries.emplace_back(key, value);
}

bool IniConfig::has_section(const std::string& section) const {
    return find_section(section) != nullptr;
}

std::vector<std::string> IniConfig::sections() const {
    std::vector<std::string> out;
    out.reserve(sections_.size());
    for (const auto& s : sections_) out.push_back(s.name);
    return out;
}

std::vector<std::pair<std::string, std::string>> IniConfig::entries(const std::string& section) const {
    const Section* s = find_section(section);
    if (!s) return {};
    return s->entries;
}

std::string IniConfig::dump() const {
    std::string out;
    bool first = true;
    for (const auto& s : sections_) {
        if (!first) out += '\n';
        first = false;
        if (!s.name.empty()) {
            out += '[' + s.name + "]\n";
        }
        for (const auto& [k, v] : s.entries) {
            out += k + " = " + v + '\n';
        }
    }
    return out;
}

nlohmann::ordered_json IniConfig::to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& s : sections_) {
        nlohmann::ordered_json sec = nlohmann::ordered_json::object();
        for (const auto& [k, v] : s.entries) sec[k] = v;
        j[s.name.empty() ? "" : s.name] = std::move(sec);
    }
    return j;
}

}  // namespace retiomics
