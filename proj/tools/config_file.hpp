#pragma once

#include <CLI11.hpp>

#include <map>
#include <memory>
#include <string>

// key = value files with [section] headers naming subcommands ("[verify.kernel]").
// '#' and ';' start comments; values may be double-quoted. Each item remembers its line
// so errors raised later by CLI11 can point back into the file.
class KeyValueConfig : public CLI::ConfigBase {
public:
    using LineMap = std::map<std::string, std::string>;  // full item name -> "file:line"

    explicit KeyValueConfig(std::shared_ptr<LineMap> lines, std::string file)
        : lines_(std::move(lines)), file_(std::move(file)) {}

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        std::vector<CLI::ConfigItem> items;
        std::vector<std::string> section;
        std::string raw;
        int lineno = 0;
        auto where = [&] { return file_ + ":" + std::to_string(lineno); };
        while (std::getline(in, raw)) {
            ++lineno;
            std::string line = strip_comment(raw);
            CLI::detail::trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') throw CLI::ConfigError(where() + ": unterminated section header '" + line + "'");
                std::string name = line.substr(1, line.size() - 2);
                CLI::detail::trim(name);
                section.clear();
                if (name.empty() || name == "default") continue;
                std::size_t start = 0;
                for (std::size_t dot; (dot = name.find('.', start)) != std::string::npos; start = dot + 1)
                    section.push_back(name.substr(start, dot - start));
                section.push_back(name.substr(start));
                for (const auto& s : section)
                    if (s.empty()) throw CLI::ConfigError(where() + ": empty name in section '" + name + "'");
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos) throw CLI::ConfigError(where() + ": expected key = value, got '" + line + "'");
            std::string key = line.substr(0, eq), value = line.substr(eq + 1);
            CLI::detail::trim(key);
            CLI::detail::trim(value);
            if (key.empty()) throw CLI::ConfigError(where() + ": missing key before '='");
            if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
            CLI::ConfigItem item;
            item.parents = section;
            item.name = key;
            item.inputs = {value};
            (*lines_)[item.fullname()] = where() + " (key '" + key + "')";
            items.push_back(std::move(item));
        }
        return items;
    }

private:
    static std::string strip_comment(const std::string& s) {
        bool quoted = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') quoted = !quoted;
            if (!quoted && (s[i] == '#' || s[i] == ';')) return s.substr(0, i);
        }
        return s;
    }

    std::shared_ptr<LineMap> lines_;
    std::string file_;
};
