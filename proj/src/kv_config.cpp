#include "galvomosaic/kv_config.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "galvomosaic/errors.hpp"

namespace galvomosaic {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::string_view text, std::string source) {
    KeyValueFile kv;
    kv.source_ = std::move(source);
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(line), kv.source_ + ":" + std::to_string(line_no) +
                                                     ": expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("", kv.source_ + ":" + std::to_string(line_no) + ": empty key");
        }
        kv.entries_.push_back(Entry{std::string(key), std::string(value), line_no});
    }
    kv.used_.assign(kv.entries_.size(), false);
    return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

bool KeyValueFile::has(std::string_view key) const {
    for (const auto& e : entries_) {
        if (e.key == key) return true;
    }
    return false;
}

std::optional<std::string> KeyValueFile::get(std::string_view key) {
    std::optional<std::string> out;
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        if (entries_[k].key == key) {
            out = entries_[k].value;
            used_[k] = true;
        }
    }
    return out;
}

std::vector<std::string> KeyValueFile::get_all(std::string_view key) {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        if (entries_[k].key == key) {
            out.push_back(entries_[k].value);
            used_[k] = true;
        }
    }
    return out;
}

std::optional<double> KeyValueFile::get_optional_double(std::string_view key) {
    const auto v = get(key);
    if (!v) return std::nullopt;
    double out = 0.0;
    const auto* end = v->data() + v->size();
    const auto [ptr, ec] = std::from_chars(v->data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(std::string(key), "expected a number, got '" + *v + "'");
    }
    return out;
}

double KeyValueFile::get_double(std::string_view key, double fallback) {
    return get_optional_double(key).value_or(fallback);
}

long long KeyValueFile::get_int64(std::string_view key, long long fallback) {
    const auto v = get(key);
    if (!v) return fallback;
    long long out = 0;
    const auto* end = v->data() + v->size();
    const auto [ptr, ec] = std::from_chars(v->data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(std::string(key), "expected an integer, got '" + *v + "'");
    }
    return out;
}

int KeyValueFile::get_int(std::string_view key, int fallback) {
    const long long v = get_int64(key, fallback);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw ConfigError(std::string(key), "integer out of range");
    }
    return static_cast<int>(v);
}

bool KeyValueFile::get_bool(std::string_view key, bool fallback) {
    const auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "on" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "off" || *v == "no" || *v == "0") return false;
    throw ConfigError(std::string(key), "expected true/false, got '" + *v + "'");
}

void KeyValueFile::reject_unused() const {
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        if (!used_[k]) {
            throw ConfigError(entries_[k].key, source_ + ":" + std::to_string(entries_[k].line) +
                                                   ": unknown key");
        }
    }
}

}  // namespace galvomosaic
