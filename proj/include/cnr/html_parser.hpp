#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cnr/dom.hpp"
#include "cnr/entities.hpp"
#include "cnr/text.hpp"

namespace cnr {

namespace detail {

inline bool tag_in(std::string_view tag, std::initializer_list<std::string_view> set) {
    return std::find(set.begin(), set.end(), tag) != set.end();
}

inline bool is_void_element(std::string_view tag) {
    return tag_in(tag, {"area", "base", "basefont", "bgsound", "br", "col", "embed", "frame", "hr", "img", "input",
                        "keygen", "link", "meta", "param", "source", "track", "wbr"});
}

inline bool is_special_element(std::string_view tag) {
    return tag_in(tag, {"address", "applet",   "area",     "article",  "aside",   "base",     "basefont", "bgsound",
                        "blockquote", "body",  "br",       "button",   "caption", "center",   "col",      "colgroup",
                        "dd",      "details",  "dir",      "div",      "dl",      "dt",       "embed",    "fieldset",
                        "figcaption", "figure", "footer",  "form",     "frame",   "frameset", "h1",       "h2",
                        "h3",      "h4",       "h5",       "h6",       "head",    "header",   "hgroup",   "hr",
                        "html",    "iframe",   "img",      "input",    "keygen",  "li",       "link",     "listing",
                        "main",    "marquee",  "menu",     "meta",     "nav",     "noembed",  "noframes", "noscript",
                        "object",  "ol",       "p",        "param",    "plaintext", "pre",    "script",   "search",
                        "section", "select",   "source",   "style",    "summary", "table",    "tbody",    "td",
                        "template", "textarea", "tfoot",   "th",       "thead",   "title",    "tr",       "track",
                        "ul",      "wbr",      "xmp"});
}

inline bool is_formatting_element(std::string_view tag) {
    return tag_in(tag, {"a", "b", "big", "code", "em", "font", "i", "nobr", "s", "small", "strike", "strong", "tt", "u"});
}

inline bool is_heading(std::string_view tag) { return tag_in(tag, {"h1", "h2", "h3", "h4", "h5", "h6"}); }

// Start tags that implicitly end an open <p>.
inline bool closes_paragraph(std::string_view tag) {
    return is_heading(tag) ||
           tag_in(tag, {"address", "article", "aside", "blockquote", "center", "details", "dialog", "dir", "div",
                        "dl", "fieldset", "figcaption", "figure", "footer", "form", "header", "hgroup", "hr",
                        "listing", "main", "menu", "nav", "ol", "p", "plaintext", "pre", "search", "section",
                        "summary", "table", "ul", "xmp", "li", "dd", "dt"});
}

inline bool is_head_element(std::string_view tag) {
    return tag_in(tag, {"base", "basefont", "bgsound", "link", "meta", "title", "style", "script", "noscript",
                        "template"});
}

enum class TextMode { Data, RawText, RcData, PlainText };

struct Token {
    enum class Type { StartTag, EndTag, Text, Eof };

    Type type = Type::Eof;
    std::string name; // tag name or text content
    std::vector<Attribute> attributes;
    bool self_closing = false;
};

class HtmlTokenizer {
public:
    explicit HtmlTokenizer(std::string input) : input_(std::move(input)) {}

    /// Switches to raw text (script, style, ...) or RCDATA (title, textarea)
    /// until the matching end tag.
    void enter_text_mode(TextMode mode, std::string end_tag) {
        mode_ = mode;
        end_tag_ = std::move(end_tag);
    }

    Token next() {
        while (true) {
            if (mode_ != TextMode::Data) {
                if (auto tok = raw_text()) {
                    return *std::move(tok);
                }
                continue;
            }
            if (pos_ >= input_.size()) {
                return Token{};
            }
            if (input_[pos_] != '<') {
                const std::size_t end = std::min(input_.find('<', pos_), input_.size());
                Token tok{Token::Type::Text, decode_entities(std::string_view(input_).substr(pos_, end - pos_)), {}, false};
                pos_ = end;
                return tok;
            }
            if (auto tok = markup()) {
                return *std::move(tok);
            }
        }
    }

private:
    static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
    static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\f' || c == '\r'; }

    bool starts_with(std::string_view prefix) const { return std::string_view(input_).substr(pos_).starts_with(prefix); }

    void skip_past(std::string_view terminator, std::size_t from) {
        const std::size_t at = input_.find(terminator, from);
        pos_ = at == std::string::npos ? input_.size() : at + terminator.size();
    }

    std::optional<Token> raw_text() {
        if (mode_ == TextMode::PlainText) {
            Token tok{Token::Type::Text, input_.substr(pos_), {}, false};
            pos_ = input_.size();
            mode_ = TextMode::Data;
            if (tok.name.empty()) {
                return std::nullopt;
            }
            return tok;
        }
        std::size_t end = input_.size();
        for (std::size_t at = input_.find("</", pos_); at != std::string::npos; at = input_.find("</", at + 2)) {
            const std::size_t name_end = at + 2 + end_tag_.size();
            if (name_end > input_.size()) {
                break;
            }
            if (ascii_lowercase(std::string_view(input_).substr(at + 2, end_tag_.size())) != end_tag_) {
                continue;
            }
            if (name_end == input_.size() || is_space(input_[name_end]) || input_[name_end] == '/' ||
                input_[name_end] == '>') {
                end = at;
                break;
            }
        }
        std::string text = input_.substr(pos_, end - pos_);
        if (mode_ == TextMode::RcData) {
            text = decode_entities(text);
        }
        pos_ = end;
        mode_ = TextMode::Data;
        if (text.empty()) {
            return std::nullopt;
        }
        return Token{Token::Type::Text, std::move(text), {}, false};
    }

    // Called with input_[pos_] == '<'. Returns nullopt for dropped markup
    // (comments, doctype, processing instructions, bogus comments).
    std::optional<Token> markup() {
        if (starts_with("<!--")) {
            if (starts_with("<!-->")) {
                pos_ += 5;
            } else if (starts_with("<!--->")) {
                pos_ += 6;
            } else {
                skip_past("-->", pos_ + 4);
            }
            return std::nullopt;
        }
        if (starts_with("<!") || starts_with("<?")) {
            skip_past(">", pos_ + 2);
            return std::nullopt;
        }
        if (starts_with("</")) {
            if (pos_ + 2 < input_.size() && is_alpha(input_[pos_ + 2])) {
                pos_ += 2;
                auto tok = tag(Token::Type::EndTag);
                return tok;
            }
            if (starts_with("</>")) {
                pos_ += 3;
            } else {
                skip_past(">", pos_ + 2);
            }
            return std::nullopt;
        }
        if (pos_ + 1 < input_.size() && is_alpha(input_[pos_ + 1])) {
            ++pos_;
            return tag(Token::Type::StartTag);
        }
        ++pos_;
        return Token{Token::Type::Text, "<", {}, false};
    }

    // Parses a tag whose name starts at pos_. A tag cut off by end of input is
    // dropped.
    std::optional<Token> tag(Token::Type type) {
        Token tok{type, {}, {}, false};
        const std::size_t n = input_.size();
        while (pos_ < n && !is_space(input_[pos_]) && input_[pos_] != '/' && input_[pos_] != '>') {
            tok.name.push_back(ascii_lower(input_[pos_++]));
        }
        while (true) {
            while (pos_ < n && (is_space(input_[pos_]) || input_[pos_] == '/')) {
                if (input_[pos_] == '/' && pos_ + 1 < n && input_[pos_ + 1] == '>') {
                    tok.self_closing = true;
                }
                ++pos_;
            }
            if (pos_ >= n) {
                return std::nullopt;
            }
            if (input_[pos_] == '>') {
                ++pos_;
                break;
            }
            tok.self_closing = false;
            std::string name;
            name.push_back(ascii_lower(input_[pos_++]));
            while (pos_ < n && !is_space(input_[pos_]) && input_[pos_] != '/' && input_[pos_] != '>' &&
                   input_[pos_] != '=') {
                name.push_back(ascii_lower(input_[pos_++]));
            }
            while (pos_ < n && is_space(input_[pos_])) {
                ++pos_;
            }
            std::string value;
            if (pos_ < n && input_[pos_] == '=') {
                ++pos_;
                while (pos_ < n && is_space(input_[pos_])) {
                    ++pos_;
                }
                if (pos_ < n && (input_[pos_] == '"' || input_[pos_] == '\'')) {
                    const char quote = input_[pos_++];
                    const std::size_t close = input_.find(quote, pos_);
                    if (close == std::string::npos) {
                        pos_ = n;
                        return std::nullopt;
                    }
                    value = decode_entities(std::string_view(input_).substr(pos_, close - pos_), true);
                    pos_ = close + 1;
                } else {
                    const std::size_t start = pos_;
                    while (pos_ < n && !is_space(input_[pos_]) && input_[pos_] != '>') {
                        ++pos_;
                    }
                    value = decode_entities(std::string_view(input_).substr(start, pos_ - start), true);
                }
            }
            const bool duplicate = std::any_of(tok.attributes.begin(), tok.attributes.end(),
                                               [&](const Attribute& a) { return a.name == name; });
            if (!duplicate) {
                tok.attributes.push_back({std::move(name), std::move(value)});
            }
        }
        return tok;
    }

    std::string input_;
    std::size_t pos_ = 0;
    TextMode mode_ = TextMode::Data;
    std::string end_tag_;
};

/// Simplified HTML5 tree construction: implied html/head/body, implicit end
/// tags for p/li/dd/dt/table parts, and stray end tags ignored.
class TreeConstruction {
public:
    using Handle = DomTreeBuilder::Handle;

    TreeConstruction() { stack_.push_back({builder_.add_root("html"), "html"}); }

    /// Processes one token; returns the text mode the tokenizer should enter.
    std::optional<std::pair<TextMode, std::string>> process(Token& tok) {
        switch (tok.type) {
        case Token::Type::Text: text(tok.name); break;
        case Token::Type::StartTag: return start_tag(tok);
        case Token::Type::EndTag: end_tag(tok.name); break;
        case Token::Type::Eof: break;
        }
        return std::nullopt;
    }

    DomTree finish() {
        ensure_body();
        return builder_.build();
    }

private:
    struct Open {
        Handle handle;
        std::string tag;
    };

    const std::string& current_tag() const { return stack_.back().tag; }

    bool in_head_context() const {
        return std::any_of(stack_.begin(), stack_.end(), [&](const Open& o) { return head_ && o.handle == *head_; });
    }

    bool in_foreign_content() const {
        return std::any_of(stack_.begin(), stack_.end(), [](const Open& o) { return o.tag == "svg" || o.tag == "math"; });
    }

    void insert_text(std::string_view content) {
        const Handle parent = stack_.back().handle;
        const auto& kids = builder_.children(parent);
        if (!kids.empty() && builder_.is_text(kids.back())) {
            builder_.append_text(kids.back(), content);
        } else {
            builder_.add_text(parent, std::string(content));
        }
    }

    Handle insert_element(const std::string& tag, std::vector<Attribute> attributes, bool push) {
        const Handle h = builder_.add_element(stack_.back().handle, tag, std::move(attributes));
        if (push) {
            stack_.push_back({h, tag});
        }
        return h;
    }

    void merge_attributes(Handle target, const std::vector<Attribute>& attributes) {
        auto& element = builder_.element(target);
        for (const auto& a : attributes) {
            const bool present = std::any_of(element.attributes.begin(), element.attributes.end(),
                                             [&](const Attribute& e) { return e.name == a.name; });
            if (!present) {
                element.attributes.push_back(a);
            }
        }
    }

    void ensure_head() {
        if (!head_) {
            head_ = insert_element("head", {}, true);
        }
    }

    void close_head() {
        while (stack_.size() > 1 && in_head_context()) {
            stack_.pop_back();
        }
    }

    void ensure_body(std::vector<Attribute> attributes = {}) {
        if (body_) {
            return;
        }
        ensure_head();
        close_head();
        stack_.resize(1);
        body_ = insert_element("body", std::move(attributes), true);
    }

    // Index of the topmost open `tag` reachable before a scope boundary.
    std::optional<std::size_t> find_in_scope(std::string_view tag, std::initializer_list<std::string_view> extra = {}) const {
        for (std::size_t i = stack_.size(); i-- > 0;) {
            const std::string& t = stack_[i].tag;
            if (t == tag) {
                return i;
            }
            if (tag_in(t, {"applet", "caption", "html", "table", "td", "th", "marquee", "object", "template"}) ||
                tag_in(t, extra)) {
                return std::nullopt;
            }
        }
        return std::nullopt;
    }

    std::optional<std::size_t> find_in_table_scope(std::initializer_list<std::string_view> tags) const {
        for (std::size_t i = stack_.size(); i-- > 0;) {
            const std::string& t = stack_[i].tag;
            if (tag_in(t, tags)) {
                return i;
            }
            if (tag_in(t, {"html", "table", "template"})) {
                return std::nullopt;
            }
        }
        return std::nullopt;
    }

    void pop_to(std::size_t index) {
        // html and body are never popped by end tags.
        const std::size_t floor = body_ ? 2 : 1;
        stack_.resize(std::max(index, std::min(floor, stack_.size())));
    }

    void close_paragraph_if_open() {
        if (auto i = find_in_scope("p", {"button"})) {
            pop_to(*i);
        }
    }

    void close_list_item(std::initializer_list<std::string_view> items) {
        for (std::size_t i = stack_.size(); i-- > 0;) {
            const std::string& t = stack_[i].tag;
            if (tag_in(t, items)) {
                pop_to(i);
                return;
            }
            if (is_special_element(t) && !tag_in(t, {"address", "div", "p"})) {
                return;
            }
        }
    }

    void text(std::string_view content) {
        if (!body_ && (stack_.size() == 1 || current_tag() == "head")) {
            if (text_length(content) == 0) {
                return;
            }
            ensure_body();
        }
        insert_text(content);
    }

    std::optional<std::pair<TextMode, std::string>> start_tag(Token& tok) {
        const std::string& name = tok.name;
        if (name == "html") {
            merge_attributes(stack_.front().handle, tok.attributes);
            return std::nullopt;
        }
        if (!body_) {
            if (name == "head") {
                ensure_head();
                return std::nullopt;
            }
            if (name == "body" || name == "frameset") {
                ensure_body(std::move(tok.attributes));
                return std::nullopt;
            }
            if (is_head_element(name)) {
                ensure_head();
                if (!in_head_context()) {
                    // After </head> these still belong to head.
                    const std::size_t at = stack_.size();
                    stack_.push_back({*head_, "head"});
                    auto mode = insert(tok);
                    stack_.erase(stack_.begin() + static_cast<std::ptrdiff_t>(at));
                    return mode;
                }
                return insert(tok);
            }
            ensure_body();
        } else if (name == "body") {
            merge_attributes(*body_, tok.attributes);
            return std::nullopt;
        } else if (name == "head") {
            return std::nullopt;
        }
        return insert(tok);
    }

    std::optional<std::pair<TextMode, std::string>> insert(Token& tok) {
        const std::string& name = tok.name;
        const bool foreign = in_foreign_content();
        if (!foreign) {
            if (closes_paragraph(name)) {
                if (name == "li") {
                    close_list_item({"li"});
                } else if (name == "dd" || name == "dt") {
                    close_list_item({"dd", "dt"});
                }
                close_paragraph_if_open();
                if (is_heading(name) && is_heading(current_tag())) {
                    stack_.pop_back();
                }
            } else if (name == "a") {
                for (std::size_t i = stack_.size(); i-- > 0;) {
                    if (stack_[i].tag == "a") {
                        pop_to(i);
                        break;
                    }
                    if (stack_[i].tag == "table" || stack_[i].tag == "td" || stack_[i].tag == "th") {
                        break;
                    }
                }
            } else if (name == "option" || name == "optgroup") {
                if (current_tag() == "option") {
                    stack_.pop_back();
                }
                if (name == "optgroup" && current_tag() == "optgroup") {
                    stack_.pop_back();
                }
            } else if (name == "td" || name == "th") {
                if (auto i = find_in_table_scope({"td", "th"})) {
                    pop_to(*i);
                }
                if (current_tag() == "table") {
                    insert_element("tbody", {}, true);
                }
                if (tag_in(current_tag(), {"tbody", "thead", "tfoot"})) {
                    insert_element("tr", {}, true);
                }
            } else if (name == "tr") {
                if (auto i = find_in_table_scope({"tr"})) {
                    pop_to(*i);
                }
                if (current_tag() == "table") {
                    insert_element("tbody", {}, true);
                }
            } else if (tag_in(name, {"tbody", "thead", "tfoot", "caption", "colgroup"})) {
                if (auto i = find_in_table_scope({"tbody", "thead", "tfoot", "caption", "colgroup"})) {
                    pop_to(*i);
                }
            }
        }
        const bool push = !is_void_element(name) && !(foreign && tok.self_closing);
        insert_element(name, std::move(tok.attributes), push);
        if (!push || foreign) {
            return std::nullopt;
        }
        if (tag_in(name, {"script", "style", "xmp", "iframe", "noembed", "noframes"})) {
            return std::pair{TextMode::RawText, name};
        }
        if (name == "title" || name == "textarea") {
            return std::pair{TextMode::RcData, name};
        }
        if (name == "plaintext") {
            return std::pair{TextMode::PlainText, name};
        }
        return std::nullopt;
    }

    void end_tag(const std::string& name) {
        if (!body_) {
            if (name == "head") {
                close_head();
                return;
            }
            if (name == "br") {
                ensure_body();
                insert_element("br", {}, false);
                return;
            }
            if (name == "body" || name == "html") {
                ensure_body();
                return;
            }
            for (std::size_t i = stack_.size(); i-- > 1;) {
                if (stack_[i].tag == name) {
                    stack_.resize(i);
                    return;
                }
            }
            return;
        }
        if (name == "body" || name == "html") {
            stack_.resize(2);
            return;
        }
        if (name == "p") {
            if (!find_in_scope("p", {"button"})) {
                insert_element("p", {}, false);
                return;
            }
            close_paragraph_if_open();
            return;
        }
        if (name == "br") {
            insert_element("br", {}, false);
            return;
        }
        if (name == "li" || name == "dd" || name == "dt") {
            auto i = name == "li" ? find_in_scope(name, {"ol", "ul"}) : find_in_scope(name);
            if (i) {
                pop_to(*i);
            }
            return;
        }
        if (is_heading(name)) {
            for (std::size_t i = stack_.size(); i-- > 0;) {
                if (is_heading(stack_[i].tag)) {
                    pop_to(i);
                    return;
                }
                if (tag_in(stack_[i].tag, {"applet", "caption", "html", "table", "td", "th", "marquee", "object",
                                           "template"})) {
                    return;
                }
            }
            return;
        }
        if (is_formatting_element(name)) {
            if (auto i = find_in_scope(name)) {
                pop_to(*i);
            }
            return;
        }
        if (tag_in(name, {"table", "tbody", "thead", "tfoot", "tr", "td", "th", "caption", "colgroup"})) {
            if (auto i = find_in_table_scope({name})) {
                pop_to(*i);
            }
            return;
        }
        if (is_special_element(name)) {
            if (auto i = find_in_scope(name)) {
                pop_to(*i);
            }
            return;
        }
        const bool foreign = in_foreign_content();
        for (std::size_t i = stack_.size(); i-- > 0;) {
            const std::string& t = stack_[i].tag;
            if (t == name) {
                pop_to(i);
                return;
            }
            if (is_special_element(t) && !foreign) {
                return;
            }
        }
    }

    DomTreeBuilder builder_;
    std::vector<Open> stack_;
    std::optional<Handle> head_;
    std::optional<Handle> body_;
};

} // namespace detail

/// Parses an HTML document into a DomTree. Never rejects input: invalid UTF-8
/// is replaced, malformed markup is repaired, and comments, doctypes and
/// processing instructions are dropped. The result always has an html root
/// with head and body children.
inline DomTree parse_html(std::string_view bytes) {
    std::string input = sanitize_utf8(bytes);
    // Newline normalization: CRLF and lone CR become LF.
    std::string normalized;
    normalized.reserve(input.size());
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (input[i] == '\r') {
            normalized.push_back('\n');
            if (i + 1 < input.size() && input[i + 1] == '\n') {
                ++i;
            }
        } else {
            normalized.push_back(input[i]);
        }
    }
    detail::HtmlTokenizer tokenizer(std::move(normalized));
    detail::TreeConstruction builder;
    while (true) {
        detail::Token tok = tokenizer.next();
        if (tok.type == detail::Token::Type::Eof) {
            break;
        }
        if (auto mode = builder.process(tok)) {
            tokenizer.enter_text_mode(mode->first, std::move(mode->second));
        }
    }
    return builder.finish();
}

} // namespace cnr
