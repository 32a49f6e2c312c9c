// SPDX-License-Identifier: Apache-2.0
#pragma once

// Prompt templates are plain text with <identifier> placeholders. A template
// file starts with header lines
//   #! name: trajectory
//   #! placeholders: task_description start_point_location
// followed by the body.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace motionfield::agent {

using Bindings = std::map<std::string, std::string, std::less<>>;

struct PromptTemplate {
    std::string name;
    std::vector<std::string> placeholders;  // declared binding set
    std::string body;

    /// Parses a template file; every placeholder used in the body must be declared.
    static PromptTemplate parse(std::string_view text);

    /// Placeholders in order of first use in the body.
    std::vector<std::string> used_placeholders() const;
};

/// Single-pass substitution: values are inserted verbatim and never re-expanded.
/// Throws ErrorKind::unbound_placeholder naming the first placeholder without a binding.
std::string render_prompt(const PromptTemplate& prompt, const Bindings& bindings);

/// The templates shipped with the tool, optionally overridden from a directory
/// holding <name>.txt files.
class TemplateSet {
public:
    TemplateSet();
    static TemplateSet from_directory(const std::filesystem::path& dir);

    const PromptTemplate& get(std::string_view name) const;

private:
    std::map<std::string, PromptTemplate, std::less<>> templates_;
};

}  // namespace motionfield::agent
