#include "pvfdi/models/fields.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "pvfdi/data.hpp"

namespace pvfdi {

bool parse_field(std::string_view text, double& out) {
    if (text.empty()) {
        return false;
    }
    const std::string s(text);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) {
        return false;
    }
    out = v;
    return true;
}

bool parse_field(std::string_view text, int& out) {
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size() && !text.empty();
}

bool parse_field(std::string_view text, std::size_t& out) {
    if (text.empty() || text.front() == '-') {
        return false;
    }
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

bool parse_field(std::string_view text, bool& out) {
    if (text == "true" || text == "1" || text == "yes") {
        out = true;
        return true;
    }
    if (text == "false" || text == "0" || text == "no") {
        out = false;
        return true;
    }
    return false;
}

bool parse_field(std::string_view text, SvrKernel& out) {
    if (text == "rbf") {
        out = SvrKernel::Rbf;
        return true;
    }
    if (text == "linear") {
        out = SvrKernel::Linear;
        return true;
    }
    return false;
}

std::string format_field(double v) { return format_double(v); }
std::string format_field(int v) { return std::to_string(v); }
std::string format_field(std::size_t v) { return std::to_string(v); }
std::string format_field(bool v) { return v ? "true" : "false"; }
std::string format_field(SvrKernel v) { return v == SvrKernel::Linear ? "linear" : "rbf"; }

} // namespace pvfdi
