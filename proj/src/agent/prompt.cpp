// SPDX-License-Identifier: Apache-2.0

#include "motionfield/agent/prompt.hpp"

#include <algorithm>
#include <optional>

#include "embedded_templates.hpp"
#include "motionfield/call_syntax.hpp"
#include "motionfield/error.hpp"
#include "motionfield/io/file.hpp"

namespace motionfield::agent {
namespace {

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

/// Length of the placeholder starting at body[i] ('<'), or 0 if there is none.
std::size_t placeholder_length(std::string_view body, std::size_t i) {
    if (body[i] != '<' || i + 1 >= body.size() || !ident_start(body[i + 1])) return 0;
    std::size_t j = i + 2;
    while (j < body.size() && ident_char(body[j])) ++j;
    return j < body.size() && body[j] == '>' ? j + 1 - i : 0;
}

std::optional<std::string_view> header_value(std::string_view line, std::string_view key) {
    if (!line.starts_with("#!")) return std::nullopt;
    line = call_syntax::trim(line.substr(2));
    if (!line.starts_with(key)) return std::nullopt;
    line = call_syntax::trim(line.substr(key.size()));
    if (!line.starts_with(':')) return std::nullopt;
    return call_syntax::trim(line.substr(1));
}

}  // namespace

PromptTemplate PromptTemplate::parse(std::string_view text) {
    PromptTemplate t;
    bool have_placeholders = false;
    while (text.starts_with("#!")) {
        const std::size_t nl = text.find('\n');
        const std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto v = header_value(line, "name")) {
            t.name = std::string(*v);
        } else if (const auto p = header_value(line, "placeholders")) {
            have_placeholders = true;
            std::string_view rest = *p;
            while (!rest.empty()) {
                const std::size_t sp = rest.find_first_of(" \t,");
                const std::string_view word = rest.substr(0, sp);
                if (!word.empty()) t.placeholders.emplace_back(word);
                rest = sp == std::string_view::npos ? std::string_view{} : rest.substr(sp + 1);
            }
        } else {
            fail(ErrorKind::malformed, "template: unknown header '" + std::string(line) + "'");
        }
    }
    require(!t.name.empty(), ErrorKind::malformed, "template: missing '#! name:' header");
    require(have_placeholders, ErrorKind::malformed, "template " + t.name + ": missing '#! placeholders:' header");
    t.body = std::string(text);
    for (const auto& used : t.used_placeholders()) {
        require(std::find(t.placeholders.begin(), t.placeholders.end(), used) != t.placeholders.end(),
                ErrorKind::malformed, "template " + t.name + ": placeholder <" + used + "> is not declared");
    }
    return t;
}

std::vector<std::string> PromptTemplate::used_placeholders() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < body.size(); ++i) {
        const std::size_t n = placeholder_length(body, i);
        if (n == 0) continue;
        std::string name = body.substr(i + 1, n - 2);
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
        i += n - 1;
    }
    return out;
}

std::string render_prompt(const PromptTemplate& prompt, const Bindings& bindings) {
    const std::string_view body = prompt.body;
    std::string out;
    out.reserve(body.size());
    for (std::size_t i = 0; i < body.size();) {
        const std::size_t n = placeholder_length(body, i);
        if (n == 0) {
            out.push_back(body[i++]);
            continue;
        }
        const std::string_view name = body.substr(i + 1, n - 2);
        const auto it = bindings.find(name);
        require(it != bindings.end(), ErrorKind::unbound_placeholder,
                "unbound placeholder <" + std::string(name) + "> in template " + prompt.name);
        out += it->second;
        i += n;
    }
    return out;
}

TemplateSet::TemplateSet() {
    for (const auto& [name, text] : detail::embedded_templates()) {
        PromptTemplate t = PromptTemplate::parse(text);
        templates_.emplace(t.name, std::move(t));
    }
}

TemplateSet TemplateSet::from_directory(const std::filesystem::path& dir) {
    TemplateSet set;
    for (auto& [name, t] : set.templates_) {
        const auto path = dir / (name + ".txt");
        if (!std::filesystem::exists(path)) continue;
        PromptTemplate loaded = PromptTemplate::parse(io::read_text_file(path));
        require(loaded.name == name, ErrorKind::malformed,
                path.string() + ": declares name '" + loaded.name + "', expected '" + name + "'");
        t = std::move(loaded);
    }
    return set;
}

const PromptTemplate& TemplateSet::get(std::string_view name) const {
    const auto it = templates_.find(name);
    require(it != templates_.end(), ErrorKind::invalid_argument, "no template named '" + std::string(name) + "'");
    return it->second;
}

}  // namespace motionfield::agent
