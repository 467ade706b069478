#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace galvomosaic {

/// `key = value` text, one pair per line, `#` starting a comment. Keys may
/// repeat; lookups mark keys as used so leftovers can be rejected.
class KeyValueFile {
public:
    struct Entry {
        std::string key;
        std::string value;
        int line = 0;
    };

    static KeyValueFile parse(std::string_view text, std::string source = "<string>");
    static KeyValueFile load(const std::filesystem::path& path);

    [[nodiscard]] bool has(std::string_view key) const;
    /// Last value for key.
    std::optional<std::string> get(std::string_view key);
    /// Every value for key, in file order.
    std::vector<std::string> get_all(std::string_view key);

    double get_double(std::string_view key, double fallback);
    std::optional<double> get_optional_double(std::string_view key);
    int get_int(std::string_view key, int fallback);
    long long get_int64(std::string_view key, long long fallback);
    bool get_bool(std::string_view key, bool fallback);

    /// Throws ConfigError for the first key never looked up.
    void reject_unused() const;

    [[nodiscard]] const std::string& source() const { return source_; }
    [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }

private:
    std::string source_;
    std::vector<Entry> entries_;
    std::vector<bool> used_;
};

}  // namespace galvomosaic
