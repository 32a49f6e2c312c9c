// SPDX-License-Identifier: Apache-2.0

#include "motionfield/call_syntax.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "motionfield/error.hpp"

namespace motionfield::call_syntax {
namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string_view trim(std::string_view text) {
    while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
    while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
    return text;
}

std::string_view unquote(std::string_view text) {
    text = trim(text);
    if (text.size() >= 2 && (text.front() == '"' || text.front() == '\'') && text.back() == text.front()) {
        text = text.substr(1, text.size() - 2);
    }
    return text;
}

std::vector<std::string_view> split(std::string_view text, char separator) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == separator) {
            parts.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

std::optional<long long> parse_integer(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return std::nullopt;
    long long value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
    return value;
}

std::optional<double> parse_decimal(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return std::nullopt;
    double value = 0.0;
    const auto [end, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value, std::chars_format::general);
    if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::optional<std::pair<std::string_view, std::string_view>> split_key_value(std::string_view text) {
    const std::size_t pos = text.find_first_of(":=");
    if (pos == std::string_view::npos) return std::nullopt;
    const std::string_view key = trim(text.substr(0, pos));
    const std::string_view value = trim(text.substr(pos + 1));
    if (key.empty()) return std::nullopt;
    for (const char c : key) {
        if (!is_ident(c)) return std::nullopt;
    }
    return std::make_pair(key, value);
}

FunctionCall parse_call(std::string_view text) {
    text = trim(text);
    while (!text.empty() && (text.front() == '`')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == '`' || text.back() == ';' || is_space(text.back()))) {
        text.remove_suffix(1);
    }
    text = trim(text);
    require(!text.empty() && is_ident_start(text.front()), ErrorKind::malformed, "expected a function call");
    std::size_t i = 0;
    while (i < text.size() && is_ident(text[i])) ++i;
    FunctionCall call;
    call.name = std::string(text.substr(0, i));
    while (i < text.size() && is_space(text[i])) ++i;
    require(i < text.size() && text[i] == '(', ErrorKind::malformed, "expected '(' after " + call.name);
    const std::size_t close = text.find(')', i + 1);
    require(close != std::string_view::npos, ErrorKind::malformed, "unterminated argument list");
    require(trim(text.substr(close + 1)).empty(), ErrorKind::malformed, "trailing text after function call");
    require(text.find('(', i + 1) == std::string_view::npos || text.find('(', i + 1) > close,
            ErrorKind::malformed, "nested parentheses in argument list");
    call.arguments = std::string(text.substr(i + 1, close - i - 1));
    return call;
}

std::optional<FunctionCall> find_call(std::string_view text, std::string_view name_prefix) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!is_ident_start(text[i]) || (i > 0 && is_ident(text[i - 1]))) continue;
        std::size_t j = i;
        while (j < text.size() && is_ident(text[j])) ++j;
        std::size_t k = j;
        while (k < text.size() && (text[k] == ' ' || text[k] == '\t')) ++k;
        if (k < text.size() && text[k] == '(' && text.substr(i, j - i).starts_with(name_prefix)) {
            const std::size_t close = text.find(')', k + 1);
            if (close == std::string_view::npos) return std::nullopt;
            return FunctionCall{std::string(text.substr(i, j - i)), std::string(text.substr(k + 1, close - k - 1))};
        }
        i = j;
    }
    return std::nullopt;
}

}  // namespace motionfield::call_syntax
