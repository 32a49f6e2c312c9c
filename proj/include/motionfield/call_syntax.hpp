// SPDX-License-Identifier: Apache-2.0
#pragma once

// Lexing helpers for the agent's function-call strings, e.g.
//   Set_2_Points (start: 143, top-right; end: 33, bottom-right)
//   Set_Camera_Motion(x_translation: 0.1, ..., motion_type: "uniform")

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace motionfield::call_syntax {

struct FunctionCall {
    std::string name;
    std::string arguments;  // text between the parentheses
};

/// Parses `Name ( args )` occupying the whole of `text` (surrounding
/// whitespace, backticks and a trailing ';' are tolerated).
FunctionCall parse_call(std::string_view text);

/// Finds the first `Identifier(` ... `)` in free text whose name starts with
/// `name_prefix`.
std::optional<FunctionCall> find_call(std::string_view text, std::string_view name_prefix = {});

std::string_view trim(std::string_view text);

/// Strips one pair of matching '"' or '\'' quotes.
std::string_view unquote(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char separator);

/// Strict integer literal (optional sign, digits only).
std::optional<long long> parse_integer(std::string_view text);

/// Strict finite decimal literal.
std::optional<double> parse_decimal(std::string_view text);

/// `key: value` or `key = value`.
std::optional<std::pair<std::string_view, std::string_view>> split_key_value(std::string_view text);

}  // namespace motionfield::call_syntax
