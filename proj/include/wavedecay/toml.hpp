#pragma once

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "wavedecay/error.hpp"

namespace wavedecay {

// ---------------------------------------------------------------------------
// Minimal strict TOML subset for experiment configs: [tables], key = value,
// strings, numbers, booleans, single-line homogeneous arrays, # comments.
// Keys are flattened to "table.key". Anything else is rejected loudly.
// ---------------------------------------------------------------------------
struct TomlValue {
    enum class Type { string, number, boolean, number_array, string_array };

    Type type = Type::number;
    std::string str;
    double num = 0.0;
    bool flag = false;
    std::vector<double> nums;
    std::vector<std::string> strs;

    std::string type_name() const {
        switch (type) {
            case Type::string: return "string";
            case Type::number: return "number";
            case Type::boolean: return "boolean";
            case Type::number_array: return "number array";
            case Type::string_array: return "string array";
        }
        return "?";
    }
};

using TomlTable = std::map<std::string, TomlValue>;

namespace toml_detail {

inline std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// remove a trailing comment that is not inside a string literal
inline std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        else if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

inline bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
            return false;
    return true;
}

inline bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

inline TomlValue parse_scalar(const std::string& raw, int line) {
    const std::string s = strip(raw);
    TomlValue v;
    if (s.empty())
        throw ConfigError("toml: line " + std::to_string(line) + ": missing value");
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"')
            throw ConfigError("toml: line " + std::to_string(line) +
                              ": unterminated string");
        v.type = TomlValue::Type::string;
        v.str = s.substr(1, s.size() - 2);
        if (v.str.find('"') != std::string::npos)
            throw ConfigError("toml: line " + std::to_string(line) +
                              ": embedded quotes are not supported");
        return v;
    }
    if (s == "true" || s == "false") {
        v.type = TomlValue::Type::boolean;
        v.flag = (s == "true");
        return v;
    }
    double num = 0.0;
    if (parse_number(s, num)) {
        v.type = TomlValue::Type::number;
        v.num = num;
        return v;
    }
    throw ConfigError("toml: line " + std::to_string(line) + ": cannot parse value '" +
                      s + "'");
}

inline std::vector<std::string> split_array_items(const std::string& body, int line) {
    std::vector<std::string> items;
    std::string cur;
    bool in_str = false;
    for (char c : body) {
        if (c == '"') in_str = !in_str;
        if (c == ',' && !in_str) {
            items.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (in_str)
        throw ConfigError("toml: line " + std::to_string(line) + ": unterminated string");
    if (!strip(cur).empty()) items.push_back(cur);
    return items;
}

}  // namespace toml_detail

inline TomlTable parse_toml(const std::string& text) {
    using namespace toml_detail;
    TomlTable table;
    std::istringstream in(text);
    std::string raw, prefix;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = strip(strip_comment(raw));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("toml: line " + std::to_string(line_no) +
                                  ": malformed table header");
            const std::string name = strip(line.substr(1, line.size() - 2));
            if (!valid_key(name))
                throw ConfigError("toml: line " + std::to_string(line_no) +
                                  ": invalid table name '" + name + "'");
            prefix = name + ".";
            continue;
        }

        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("toml: line " + std::to_string(line_no) +
                              ": expected key = value");
        const std::string key = strip(line.substr(0, eq));
        if (!valid_key(key))
            throw ConfigError("toml: line " + std::to_string(line_no) +
                              ": invalid key '" + key + "'");
        const std::string full = prefix + key;
        if (table.count(full))
            throw ConfigError("toml: line " + std::to_string(line_no) +
                              ": duplicate key '" + full + "'");

        const std::string value = strip(line.substr(eq + 1));
        if (!value.empty() && value.front() == '[') {
            if (value.back() != ']')
                throw ConfigError("toml: line " + std::to_string(line_no) +
                                  ": arrays must close on the same line");
            TomlValue v;
            bool first = true;
            for (const std::string& item :
                 split_array_items(value.substr(1, value.size() - 2), line_no)) {
                const TomlValue elem = parse_scalar(item, line_no);
                if (first) {
                    v.type = (elem.type == TomlValue::Type::string)
                                 ? TomlValue::Type::string_array
                                 : TomlValue::Type::number_array;
                    first = false;
                }
                if (elem.type == TomlValue::Type::string &&
                    v.type == TomlValue::Type::string_array)
                    v.strs.push_back(elem.str);
                else if (elem.type == TomlValue::Type::number &&
                         v.type == TomlValue::Type::number_array)
                    v.nums.push_back(elem.num);
                else
                    throw ConfigError("toml: line " + std::to_string(line_no) +
                                      ": arrays must be homogeneous");
            }
            if (first) v.type = TomlValue::Type::number_array;  // empty array
            table[full] = v;
        } else {
            table[full] = parse_scalar(value, line_no);
        }
    }
    return table;
}

inline TomlTable parse_toml_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_toml(buf.str());
}

}  // namespace wavedecay
