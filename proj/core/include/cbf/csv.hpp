#pragma once

#include <charconv>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace cbf::csv {

/// Shortest round-trip decimal form of v; bit-stable for identical inputs.
inline std::string format(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

inline std::string format(std::int64_t v) { return std::to_string(v); }
inline std::string format(std::uint64_t v) { return std::to_string(v); }
inline std::string format(int v) { return std::to_string(v); }
inline std::string format(bool v) { return v ? "1" : "0"; }
inline std::string format(const std::string& v) { return v; }
inline std::string format(const char* v) { return v; }

/// Accumulates a CSV document in memory; rows are emitted in call order, so
/// output bytes are a pure function of the appended values.
class Writer {
public:
    explicit Writer(std::initializer_list<std::string> header) {
        bool first = true;
        for (const auto& h : header) {
            if (!first) body_ += ',';
            body_ += h;
            first = false;
        }
        body_ += '\n';
    }

    template <typename... Ts>
    void row(const Ts&... values) {
        bool first = true;
        (append_cell(format(values), first), ...);
        body_ += '\n';
    }

    const std::string& str() const { return body_; }

private:
    void append_cell(const std::string& cell, bool& first) {
        if (!first) body_ += ',';
        body_ += cell;
        first = false;
    }

    std::string body_;
};

} // namespace cbf::csv
