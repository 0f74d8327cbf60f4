#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cnr/cnr.hpp"

namespace cnr::testing {

inline std::filesystem::path source_dir() { return CNR_TEST_SOURCE_DIR; }
inline std::filesystem::path corpus_dir() { return source_dir() / "corpus"; }
inline std::filesystem::path fixture_dir() { return source_dir() / "fixtures"; }

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// First element whose id attribute equals `id`.
inline NodeId find_by_id(const DomTree& tree, std::string_view id) {
    for (std::uint32_t i = 0; i < tree.size(); ++i) {
        if (tree.attribute(NodeId{i}, "id") == id) {
            return NodeId{i};
        }
    }
    throw Error(ErrorCode::UnknownNode, "no element with id " + std::string(id));
}

inline const std::vector<std::string>& content_tags() {
    static const std::vector<std::string> tags{"div", "p", "span", "ul", "li", "table", "td",
                                               "h1", "b", "em", "section", "article"};
    return tags;
}

inline const std::vector<std::string>& noncontent_tags() {
    static const std::vector<std::string> tags{"script", "style", "img", "a", "nav", "iframe", "br", "form"};
    return tags;
}

/// Random text mixing ASCII, multi-byte letters and Unicode whitespace.
/// Roughly one in six strings is whitespace-only.
inline std::string random_text(std::mt19937_64& rng) {
    static const std::vector<std::string> words{"lorem", "ipsum", "caf\xC3\xA9", "na\xC3\xAFve", "\xE6\x97\xA5\xE6\x9C\xAC",
                                                "x", "data", "\xF0\x9F\x99\x82", "retrieval", "42"};
    static const std::vector<std::string> spaces{" ", "  ", "\n", "\t", "\xC2\xA0", "\xE2\x80\x83", "\r\n"};
    std::string out;
    const bool blank = std::uniform_int_distribution<int>(0, 5)(rng) == 0;
    const int parts = std::uniform_int_distribution<int>(1, 8)(rng);
    for (int i = 0; i < parts; ++i) {
        if (blank || std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
            out += spaces[std::uniform_int_distribution<std::size_t>(0, spaces.size() - 1)(rng)];
        } else {
            out += words[std::uniform_int_distribution<std::size_t>(0, words.size() - 1)(rng)];
        }
    }
    return out;
}

/// Random tree of at most `max_nodes` nodes (before whitespace-only text is
/// dropped). Each new node attaches to a uniformly chosen existing element.
inline DomTree random_tree(std::mt19937_64& rng, std::size_t max_nodes = 200) {
    DomTreeBuilder b;
    std::vector<DomTreeBuilder::Handle> elements{b.add_root("body")};
    const auto target = std::uniform_int_distribution<std::size_t>(1, max_nodes)(rng);
    for (std::size_t n = 1; n < target; ++n) {
        const auto parent = elements[std::uniform_int_distribution<std::size_t>(0, elements.size() - 1)(rng)];
        const int roll = std::uniform_int_distribution<int>(0, 9)(rng);
        if (roll < 4) {
            b.add_text(parent, random_text(rng));
        } else if (roll < 5) {
            const auto& tags = noncontent_tags();
            elements.push_back(b.add_element(parent, tags[std::uniform_int_distribution<std::size_t>(0, tags.size() - 1)(rng)]));
        } else {
            const auto& tags = content_tags();
            elements.push_back(b.add_element(parent, tags[std::uniform_int_distribution<std::size_t>(0, tags.size() - 1)(rng)]));
        }
    }
    return b.build();
}

inline NodeId random_node(std::mt19937_64& rng, const DomTree& tree) {
    return NodeId{std::uniform_int_distribution<std::uint32_t>(0, static_cast<std::uint32_t>(tree.size() - 1))(rng)};
}

inline BlockSet random_block_set(std::mt19937_64& rng, const DomTree& tree) {
    const auto count = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(tree.size(), 12))(rng);
    std::vector<NodeId> members;
    for (std::size_t i = 0; i < count; ++i) {
        members.push_back(random_node(rng, tree));
    }
    return BlockSet(std::move(members));
}

/// Ancestor test by walking parent links.
inline bool walk_is_ancestor(const DomTree& tree, NodeId a, NodeId b) {
    for (std::optional<NodeId> cur = b; cur; cur = tree.parent(*cur)) {
        if (*cur == a) {
            return true;
        }
    }
    return false;
}

/// Subtree membership by walking parent links from every node.
inline std::set<std::uint32_t> walk_subtree(const DomTree& tree, NodeId n) {
    std::set<std::uint32_t> out;
    for (std::uint32_t i = 0; i < tree.size(); ++i) {
        if (walk_is_ancestor(tree, n, NodeId{i})) {
            out.insert(i);
        }
    }
    return out;
}

/// Characters excluding Unicode White_Space, counted from the raw bytes.
inline std::uint64_t oracle_text_length(std::string_view s) {
    static const std::vector<std::string_view> spaces{
        "\t", "\n", "\v", "\f", "\r", " ", "\xC2\x85", "\xC2\xA0", "\xE1\x9A\x80",
        "\xE2\x80\x80", "\xE2\x80\x81", "\xE2\x80\x82", "\xE2\x80\x83", "\xE2\x80\x84", "\xE2\x80\x85",
        "\xE2\x80\x86", "\xE2\x80\x87", "\xE2\x80\x88", "\xE2\x80\x89", "\xE2\x80\x8A", "\xE2\x80\xA8",
        "\xE2\x80\xA9", "\xE2\x80\xAF", "\xE2\x81\x9F", "\xE3\x80\x80"};
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < s.size();) {
        bool space = false;
        for (auto sp : spaces) {
            if (s.substr(i, sp.size()) == sp) {
                i += sp.size();
                space = true;
                break;
            }
        }
        if (space) {
            continue;
        }
        ++count;
        ++i;
        while (i < s.size() && (static_cast<unsigned char>(s[i]) & 0xC0) == 0x80) {
            ++i;
        }
    }
    return count;
}

struct OracleAnnotation {
    std::uint64_t weight = 0;
    std::uint64_t text_length = 0;
    double cnr = 0.0;
};

/// Top-down recursive annotation, written directly from the definitions.
class CnrOracle {
public:
    CnrOracle(const DomTree& tree, const ClassifierConfig& config)
        : tree_(tree), config_(config), out_(tree.size()) {
        visit(tree.root(), false);
    }

    const OracleAnnotation& operator[](NodeId n) const { return out_[n.value]; }

private:
    OracleAnnotation visit(NodeId n, bool inside_noncontent) {
        OracleAnnotation a;
        const bool noncontent = inside_noncontent || (tree_.is_element(n) && config_.is_non_content(tree_.tag(n)));
        for (NodeId c : tree_.children(n)) {
            const OracleAnnotation child = visit(c, noncontent);
            a.weight += child.weight;
            a.text_length += child.text_length;
        }
        if (noncontent) {
            a = {1, 0, 0.0};
        } else if (tree_.is_text(n)) {
            a.weight = 1;
            a.text_length = oracle_text_length(tree_.text(n));
            a.cnr = static_cast<double>(a.text_length);
        } else {
            a.weight += 1;
            a.cnr = static_cast<double>(a.text_length) / static_cast<double>(a.weight);
        }
        out_[n.value] = a;
        return a;
    }

    const DomTree& tree_;
    const ClassifierConfig& config_;
    std::vector<OracleAnnotation> out_;
};

namespace detail {

inline bool pretty_block_tag(std::string_view tag_text) {
    static const std::vector<std::string_view> tags{"html", "head", "body", "div", "p", "ul", "ol", "li", "table",
                                                    "tr", "td", "th", "tbody", "thead", "h1", "h2", "h3", "h4",
                                                    "h5", "dl", "dt", "dd", "article", "section", "header",
                                                    "footer", "aside", "main", "nav", "figure", "form", "pre"};
    std::size_t i = 1;
    if (i < tag_text.size() && tag_text[i] == '/') {
        ++i;
    }
    std::size_t j = i;
    while (j < tag_text.size() && std::isalnum(static_cast<unsigned char>(tag_text[j]))) {
        ++j;
    }
    const std::string name = ascii_lowercase(tag_text.substr(i, j - i));
    for (auto t : tags) {
        if (name == t) {
            return true;
        }
    }
    return false;
}

} // namespace detail

/// Reformats markup: every whitespace-only gap between '>' and '<' becomes a
/// newline plus indentation, and empty gaps next to a block-level tag get
/// the same treatment. Content inside script, style and pre is untouched.
inline std::string pretty_print(std::string_view html) {
    std::string out;
    std::size_t depth = 0;
    std::size_t i = 0;
    std::string prev_tag;
    const auto lower = ascii_lowercase(html);
    while (i < html.size()) {
        if (html[i] != '<') {
            out.push_back(html[i++]);
            continue;
        }
        const std::size_t close = html.find('>', i);
        if (close == std::string_view::npos) {
            out.append(html.substr(i));
            break;
        }
        const std::string_view tag = html.substr(i, close - i + 1);
        out.append(tag);
        i = close + 1;
        for (std::string_view raw : {"script", "style", "pre", "textarea", "title"}) {
            if (lower.compare(i - tag.size(), raw.size() + 1, "<" + std::string(raw)) == 0) {
                const auto end = lower.find("</" + std::string(raw), i);
                const std::size_t stop = end == std::string::npos ? html.size() : end;
                out.append(html.substr(i, stop - i));
                i = stop;
                break;
            }
        }
        if (tag.size() > 1 && tag[1] != '/' && tag[1] != '!' && tag.back() == '>' && tag[tag.size() - 2] != '/') {
            ++depth;
        } else if (tag.size() > 1 && tag[1] == '/' && depth > 0) {
            --depth;
        }
        std::size_t j = i;
        while (j < html.size() && (html[j] == ' ' || html[j] == '\t' || html[j] == '\n' || html[j] == '\r')) {
            ++j;
        }
        if (j >= html.size() || html[j] != '<') {
            continue;
        }
        const std::size_t next_close = html.find('>', j);
        const std::string_view next_tag = html.substr(j, next_close == std::string_view::npos ? 1 : next_close - j + 1);
        if (j > i || detail::pretty_block_tag(tag) || detail::pretty_block_tag(next_tag)) {
            out += '\n';
            out.append(std::min<std::size_t>(depth, 40) * 2, ' ');
            i = j;
        }
    }
    return out;
}

} // namespace cnr::testing
