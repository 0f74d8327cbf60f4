#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cnr/dom.hpp"
#include "cnr/html_parser.hpp"
#include "cnr/path.hpp"
#include "cnr/ratio.hpp"
#include "cnr/text.hpp"

namespace cnr {

enum class RenderFormat { HtmlFragment, PlainText, JsonReport };

/// Which text nodes plain-text rendering keeps.
enum class TextScope {
    Visible,     // everything except script/style-like element text
    ContentOnly, // only text that contributes to the CNR annotations
};

namespace detail {

inline bool is_raw_text_parent(std::string_view tag) {
    return tag_in(tag, {"script", "style", "xmp", "iframe", "noembed", "noframes", "plaintext"});
}

inline bool is_hidden_text_parent(std::string_view tag) {
    return tag_in(tag, {"script", "style", "noscript", "template", "head", "title"});
}

inline bool is_block_level(std::string_view tag) {
    return is_heading(tag) ||
           tag_in(tag, {"address", "article", "aside", "blockquote", "body", "br", "caption", "dd", "details",
                        "dialog", "div", "dl", "dt", "fieldset", "figcaption", "figure", "footer", "form", "header",
                        "hgroup", "hr", "html", "li", "main", "nav", "ol", "p", "pre", "section", "summary", "table",
                        "tbody", "td", "tfoot", "th", "thead", "tr", "ul"});
}

inline void escape_html(std::string& out, std::string_view s, bool attribute) {
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += attribute ? "<" : "&lt;"; break;
        case '>': out += attribute ? ">" : "&gt;"; break;
        case '"': out += attribute ? "&quot;" : "\""; break;
        default: out.push_back(c);
        }
    }
}

} // namespace detail

/// Serializes the subtree at n as HTML. Non-content descendants (images,
/// scripts, ...) are kept; attributes keep their parsed order.
inline std::string render_html(const DomTree& tree, NodeId n) {
    std::string out;
    struct Frame {
        NodeId node;
        bool closing;
    };
    std::vector<Frame> stack{{n, false}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        if (tree.is_text(f.node)) {
            const auto parent = tree.parent(f.node);
            if (parent && detail::is_raw_text_parent(tree.tag(*parent))) {
                out += tree.text(f.node);
            } else {
                detail::escape_html(out, tree.text(f.node), false);
            }
            continue;
        }
        const auto tag = tree.tag(f.node);
        if (f.closing) {
            out += "</";
            out += tag;
            out += '>';
            continue;
        }
        const auto& element = std::get<ElementData>(tree.kind(f.node));
        if (element.space_before && f.node != n) {
            out += ' ';
        }
        out += '<';
        out += tag;
        for (const auto& a : element.attributes) {
            out += ' ';
            out += a.name;
            out += "=\"";
            detail::escape_html(out, a.value, true);
            out += '"';
        }
        out += '>';
        if (detail::is_void_element(tag)) {
            continue;
        }
        stack.push_back({f.node, true});
        const auto kids = tree.children(f.node);
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
            stack.push_back({*it, false});
        }
    }
    return out;
}

/// Text of the subtree at n in document order. Whitespace runs collapse to
/// one space, block-level element boundaries become line breaks, and empty
/// lines are dropped.
inline std::string render_text(const AnnotatedTree& atree, NodeId n, TextScope scope = TextScope::Visible) {
    const DomTree& tree = atree.tree();
    std::vector<std::string> lines;
    std::string line;
    const auto flush = [&] {
        const auto trimmed = trim_ascii(line);
        if (!trimmed.empty()) {
            lines.emplace_back(trimmed);
        }
        line.clear();
    };
    const auto put = [&](std::string_view s) {
        for (char c : s) {
            if (c != ' ' || line.empty() || line.back() != ' ') {
                line.push_back(c);
            }
        }
    };
    struct Frame {
        NodeId node;
        bool closing;
        bool hidden;
    };
    std::vector<Frame> stack{{n, false, false}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        if (tree.is_text(f.node)) {
            const bool keep = scope == TextScope::ContentOnly ? atree.counted(f.node) : !f.hidden;
            if (keep) {
                put(collapse_whitespace(tree.text(f.node)));
            }
            continue;
        }
        const auto tag = tree.tag(f.node);
        if (!f.closing && !f.hidden && std::get<ElementData>(tree.kind(f.node)).space_before) {
            put(" ");
        }
        if (detail::is_block_level(tag)) {
            flush();
        }
        if (f.closing) {
            continue;
        }
        const bool hidden = f.hidden || detail::is_hidden_text_parent(tag);
        stack.push_back({f.node, true, hidden});
        const auto kids = tree.children(f.node);
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
            stack.push_back({*it, false, hidden});
        }
    }
    flush();
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) {
            out += '\n';
        }
        out += lines[i];
    }
    return out;
}

/// {nodeId, path, tag, weight, textLength, cnr} for one node. Text nodes have
/// tag "#text".
inline nlohmann::ordered_json describe_node(const AnnotatedTree& atree, NodeId n) {
    const DomTree& tree = atree.tree();
    const auto& a = atree.annotation(n);
    nlohmann::ordered_json j;
    j["nodeId"] = n.value;
    j["path"] = node_path(tree, n);
    j["tag"] = tree.is_text(n) ? std::string("#text") : std::string(tree.tag(n));
    j["weight"] = a.weight;
    j["textLength"] = a.text_length;
    j["cnr"] = a.cnr;
    return j;
}

inline std::string render(const AnnotatedTree& atree, NodeId n, RenderFormat format) {
    atree.tree().check(n);
    switch (format) {
    case RenderFormat::HtmlFragment: return render_html(atree.tree(), n);
    case RenderFormat::PlainText: return render_text(atree, n);
    case RenderFormat::JsonReport: {
        auto j = describe_node(atree, n);
        j["html"] = render_html(atree.tree(), n);
        j["text"] = render_text(atree, n);
        return j.dump(2);
    }
    }
    return {};
}

} // namespace cnr
