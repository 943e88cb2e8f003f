// Minimal XML well-formedness check for the SVG outputs: optional
// declaration, balanced tags, quoted attributes, no stray '<'.
#pragma once

#include <cctype>
#include <string>
#include <vector>

namespace testutil {

struct XmlCheck {
    bool ok = false;
    std::string root;
    std::string error;
};

inline XmlCheck check_xml(const std::string& text) {
    XmlCheck result;
    std::vector<std::string> stack;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto fail = [&result](const std::string& why) {
        result.error = why;
        return result;
    };

    while (i < n) {
        if (text[i] != '<') {
            if (text[i] == '>') {
                return fail("stray '>' outside a tag");
            }
            ++i;
            continue;
        }
        if (text.compare(i, 2, "<?") == 0) {
            const std::size_t end = text.find("?>", i);
            if (end == std::string::npos) {
                return fail("unterminated declaration");
            }
            i = end + 2;
            continue;
        }
        if (text.compare(i, 4, "<!--") == 0) {
            const std::size_t end = text.find("-->", i);
            if (end == std::string::npos) {
                return fail("unterminated comment");
            }
            i = end + 3;
            continue;
        }
        const bool closing = i + 1 < n && text[i + 1] == '/';
        std::size_t j = i + (closing ? 2 : 1);
        std::size_t name_start = j;
        while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == ':' ||
                         text[j] == '-' || text[j] == '_')) {
            ++j;
        }
        if (j == name_start) {
            return fail("tag without a name");
        }
        const std::string name = text.substr(name_start, j - name_start);
        // Walk attributes until the tag closes; quotes must balance.
        bool self_closing = false;
        while (j < n && text[j] != '>') {
            if (text[j] == '"') {
                const std::size_t end = text.find('"', j + 1);
                if (end == std::string::npos) {
                    return fail("unterminated attribute value");
                }
                j = end + 1;
                continue;
            }
            if (text[j] == '/' && j + 1 < n && text[j + 1] == '>') {
                self_closing = true;
            }
            if (text[j] == '<') {
                return fail("nested '<' inside a tag");
            }
            ++j;
        }
        if (j >= n) {
            return fail("unterminated tag");
        }
        if (closing) {
            if (stack.empty() || stack.back() != name) {
                return fail("mismatched closing tag: " + name);
            }
            stack.pop_back();
        } else if (!self_closing) {
            if (stack.empty() && !result.root.empty()) {
                return fail("multiple root elements");
            }
            if (result.root.empty()) {
                result.root = name;
            }
            stack.push_back(name);
        } else if (result.root.empty()) {
            result.root = name;
        }
        i = j + 1;
    }
    if (!stack.empty()) {
        return fail("unclosed tag: " + stack.back());
    }
    if (result.root.empty()) {
        return fail("no root element");
    }
    result.ok = true;
    return result;
}

} // namespace testutil
