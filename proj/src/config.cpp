#include "salnet/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace salnet {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

void apply_config(ExperimentSpec& spec, std::string_view text) {
    std::map<std::string, std::size_t> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        std::string_view line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const std::string content = trim(line);
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
        const std::string key = trim(std::string_view(content).substr(0, eq));
        const std::string value = trim(std::string_view(content).substr(eq + 1));
        if (key.empty()) throw ConfigError(line_no, "missing key");
        if (value.empty()) throw ConfigError(line_no, "missing value for " + key);
        if (seen.count(key)) throw ConfigError(line_no, "duplicate key " + key);
        try {
            set_param(spec, key, value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(line_no, e.what());
        }
        seen[key] = line_no;
    }
    try {
        validate(spec);
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        const auto key = what.substr(0, what.find(':'));
        const auto it = seen.find(key);
        throw ConfigError(it == seen.end() ? line_no : it->second, what);
    }
}

void load_config(ExperimentSpec& spec, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    apply_config(spec, buf.str());
}

}  // namespace salnet
