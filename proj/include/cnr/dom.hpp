#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "cnr/error.hpp"
#include "cnr/text.hpp"

namespace cnr {

/// Handle of a node inside one DomTree. Ids are dense in [0, size) and follow
/// document (preorder) order, so the root is always 0 and the subtree rooted
/// at n occupies the contiguous id range [n, n + subtree_size(n)).
struct NodeId {
    std::uint32_t value = 0;

    constexpr auto operator<=>(const NodeId&) const = default;
};

struct Attribute {
    std::string name;
    std::string value;

    bool operator==(const Attribute&) const = default;
};

struct TextData {
    std::string content;

    bool operator==(const TextData&) const = default;
};

struct ElementData {
    std::string tag;                   // lowercase
    std::vector<Attribute> attributes; // source order, lowercase names
    bool space_before = false;         // a whitespace-only text node preceded it

    bool operator==(const ElementData&) const = default;
};

using NodeKind = std::variant<TextData, ElementData>;

class DomTreeBuilder;

/// Immutable tag/text tree. Text nodes are leaves and no text node is
/// whitespace-only.
class DomTree {
public:
    std::size_t size() const noexcept { return kinds_.size(); }
    NodeId root() const noexcept { return NodeId{0}; }

    bool contains(NodeId n) const noexcept { return n.value < kinds_.size(); }

    void check(NodeId n) const {
        if (!contains(n)) {
            throw Error(ErrorCode::UnknownNode, "node " + std::to_string(n.value) + " is not in the tree");
        }
    }

    const NodeKind& kind(NodeId n) const { return check(n), kinds_[n.value]; }

    bool is_text(NodeId n) const { return std::holds_alternative<TextData>(kind(n)); }
    bool is_element(NodeId n) const { return !is_text(n); }

    /// Tag name of an element, empty for text nodes.
    std::string_view tag(NodeId n) const {
        const auto* e = std::get_if<ElementData>(&kind(n));
        return e ? std::string_view(e->tag) : std::string_view();
    }

    /// Character data of a text node, empty for elements.
    std::string_view text(NodeId n) const {
        const auto* t = std::get_if<TextData>(&kind(n));
        return t ? std::string_view(t->content) : std::string_view();
    }

    std::optional<std::string_view> attribute(NodeId n, std::string_view name) const {
        if (const auto* e = std::get_if<ElementData>(&kind(n))) {
            for (const auto& a : e->attributes) {
                if (a.name == name) {
                    return a.value;
                }
            }
        }
        return std::nullopt;
    }

    std::optional<NodeId> parent(NodeId n) const {
        check(n);
        if (n.value == 0) {
            return std::nullopt;
        }
        return NodeId{parents_[n.value]};
    }

    std::span<const NodeId> children(NodeId n) const { return check(n), std::span<const NodeId>(children_[n.value]); }

    /// Number of nodes in the subtree rooted at n, n included.
    std::size_t subtree_size(NodeId n) const { return check(n), subtree_sizes_[n.value]; }

    /// Distance from the root (root depth is 0).
    std::size_t depth(NodeId n) const { return check(n), depths_[n.value]; }

    /// (a -> b) in the reflexive-transitive closure of the child relation.
    bool is_ancestor(NodeId a, NodeId b) const {
        check(a);
        check(b);
        return a.value <= b.value && b.value < a.value + subtree_sizes_[a.value];
    }

    /// Every node of the subtree rooted at n, in document order.
    std::vector<NodeId> subtree_nodes(NodeId n) const {
        const std::size_t count = subtree_size(n);
        std::vector<NodeId> out;
        out.reserve(count);
        for (std::uint32_t i = 0; i < count; ++i) {
            out.push_back(NodeId{n.value + i});
        }
        return out;
    }

    /// Structural equality: same kinds in the same shape.
    bool operator==(const DomTree& other) const {
        return kinds_ == other.kinds_ && parents_ == other.parents_;
    }

private:
    friend class DomTreeBuilder;

    std::vector<NodeKind> kinds_;
    std::vector<std::uint32_t> parents_;
    std::vector<std::vector<NodeId>> children_;
    std::vector<std::uint32_t> subtree_sizes_;
    std::vector<std::uint32_t> depths_;
};

/// Assembles a DomTree from nodes added in any order. build() renumbers the
/// nodes in preorder and drops text nodes that contain only whitespace. The
/// separation they provided is kept as a leading space on the following
/// text node or as ElementData::space_before.
class DomTreeBuilder {
public:
    using Handle = std::size_t;

    Handle add_root(std::string tag, std::vector<Attribute> attributes = {}) {
        if (!nodes_.empty()) {
            throw Error(ErrorCode::InvalidArgument, "root already exists");
        }
        nodes_.push_back({ElementData{std::move(tag), std::move(attributes)}, kNoParent, {}});
        return 0;
    }

    /// A tree consisting of a single text node.
    Handle add_text_root(std::string content) {
        if (!nodes_.empty()) {
            throw Error(ErrorCode::InvalidArgument, "root already exists");
        }
        nodes_.push_back({TextData{std::move(content)}, kNoParent, {}});
        return 0;
    }

    Handle add_element(Handle parent, std::string tag, std::vector<Attribute> attributes = {}) {
        return add(parent, ElementData{std::move(tag), std::move(attributes)});
    }

    Handle add_text(Handle parent, std::string content) { return add(parent, TextData{std::move(content)}); }

    /// Extends an existing text node (adjacent character runs merge).
    void append_text(Handle text, std::string_view more) {
        std::get<TextData>(nodes_.at(text).kind).content.append(more);
    }

    ElementData& element(Handle h) { return std::get<ElementData>(nodes_.at(h).kind); }

    bool is_text(Handle h) const { return std::holds_alternative<TextData>(nodes_.at(h).kind); }

    const std::vector<Handle>& children(Handle h) const { return nodes_.at(h).children; }

    bool empty() const noexcept { return nodes_.empty(); }

    DomTree build() const {
        if (nodes_.empty()) {
            throw Error(ErrorCode::InvalidArgument, "cannot build an empty tree");
        }
        DomTree tree;
        tree.kinds_.reserve(nodes_.size());
        struct Frame {
            Handle handle;
            std::uint32_t parent;
            std::uint32_t depth;
            bool space_before;
        };
        std::vector<Frame> stack{{0, kNoParentId, 0, false}};
        while (!stack.empty()) {
            const Frame frame = stack.back();
            stack.pop_back();
            const auto& node = nodes_[frame.handle];
            const auto id = static_cast<std::uint32_t>(tree.kinds_.size());
            tree.kinds_.push_back(node.kind);
            if (frame.space_before) {
                if (auto* t = std::get_if<TextData>(&tree.kinds_.back())) {
                    t->content.insert(0, 1, ' ');
                } else {
                    std::get<ElementData>(tree.kinds_.back()).space_before = true;
                }
            }
            tree.parents_.push_back(frame.parent == kNoParentId ? 0 : frame.parent);
            tree.children_.emplace_back();
            tree.depths_.push_back(frame.depth);
            if (frame.parent != kNoParentId) {
                tree.children_[frame.parent].push_back(NodeId{id});
            }
            const auto first_child = stack.size();
            bool gap = false;
            for (const Handle c : node.children) {
                if (const auto* t = std::get_if<TextData>(&nodes_[c].kind); t && text_length(t->content) == 0) {
                    gap = gap || !t->content.empty();
                    continue;
                }
                stack.push_back({c, id, frame.depth + 1, gap});
                gap = false;
            }
            std::reverse(stack.begin() + static_cast<std::ptrdiff_t>(first_child), stack.end());
        }
        tree.subtree_sizes_.assign(tree.kinds_.size(), 1);
        for (std::size_t i = tree.kinds_.size(); i-- > 1;) {
            tree.subtree_sizes_[tree.parents_[i]] += tree.subtree_sizes_[i];
        }
        return tree;
    }

private:
    static constexpr Handle kNoParent = static_cast<Handle>(-1);
    static constexpr std::uint32_t kNoParentId = static_cast<std::uint32_t>(-1);

    struct Node {
        NodeKind kind;
        Handle parent;
        std::vector<Handle> children;
    };

    Handle add(Handle parent, NodeKind kind) {
        if (parent >= nodes_.size()) {
            throw Error(ErrorCode::UnknownNode, "parent handle out of range");
        }
        if (is_text(parent)) {
            throw Error(ErrorCode::InvalidArgument, "text nodes cannot have children");
        }
        const Handle h = nodes_.size();
        nodes_.push_back({std::move(kind), parent, {}});
        nodes_[parent].children.push_back(h);
        return h;
    }

    std::vector<Node> nodes_;
};

enum class NodeClass { TextNode, NonContentNode, ContentElement };

/// Tag names whose subtrees carry no countable content.
struct ClassifierConfig {
    std::unordered_set<std::string> non_content_tags = default_non_content_tags();

    static std::unordered_set<std::string> default_non_content_tags() {
        return {"script", "style", "noscript", "template", "iframe", "object", "embed", "svg",
                "video",  "audio", "canvas",   "img",      "picture", "source", "track", "map",
                "area",   "br",    "hr",       "nav",      "a",       "button", "input", "select",
                "textarea", "form", "link",    "meta",     "head",    "title",  "base"};
    }

    bool is_non_content(std::string_view tag) const { return non_content_tags.count(std::string(tag)) != 0; }

    /// One tag name per line. Blank lines and lines starting with '#' are
    /// skipped; names are lowercased.
    static ClassifierConfig from_tag_list(std::istream& in) {
        ClassifierConfig config;
        config.non_content_tags.clear();
        std::string line;
        while (std::getline(in, line)) {
            const auto name = trim_ascii(line);
            if (name.empty() || name.front() == '#') {
                continue;
            }
            config.non_content_tags.insert(ascii_lowercase(name));
        }
        return config;
    }
};

inline NodeClass classify(const DomTree& tree, NodeId n, const ClassifierConfig& config) {
    if (tree.is_text(n)) {
        return NodeClass::TextNode;
    }
    return config.is_non_content(tree.tag(n)) ? NodeClass::NonContentNode : NodeClass::ContentElement;
}

inline bool is_ancestor(const DomTree& tree, NodeId a, NodeId b) { return tree.is_ancestor(a, b); }

inline std::vector<NodeId> subtree_nodes(const DomTree& tree, NodeId n) { return tree.subtree_nodes(n); }

/// A tree with some subtrees cut away; `original[i]` maps node i of `tree`
/// back to its id in the source tree.
struct PrunedTree {
    DomTree tree;
    std::vector<NodeId> original;
};

/// Copy of `tree` without the subtrees rooted at `removed`. Returns nullopt
/// when the root itself is removed.
inline std::optional<PrunedTree> prune_subtrees(const DomTree& tree, std::span<const NodeId> removed) {
    std::vector<bool> cut(tree.size(), false);
    for (NodeId r : removed) {
        tree.check(r);
        for (std::uint32_t i = r.value; i < r.value + tree.subtree_size(r); ++i) {
            cut[i] = true;
        }
    }
    if (cut[0]) {
        return std::nullopt;
    }
    DomTreeBuilder builder;
    std::vector<DomTreeBuilder::Handle> handle(tree.size());
    std::vector<NodeId> original;
    for (std::uint32_t i = 0; i < tree.size(); ++i) {
        if (cut[i]) {
            continue;
        }
        const NodeId id{i};
        const NodeKind& kind = tree.kind(id);
        if (i == 0) {
            if (const auto* e = std::get_if<ElementData>(&kind)) {
                handle[i] = builder.add_root(e->tag, e->attributes);
            } else {
                handle[i] = builder.add_text_root(std::get<TextData>(kind).content);
            }
        } else {
            const auto p = handle[tree.parent(id)->value];
            if (const auto* e = std::get_if<ElementData>(&kind)) {
                handle[i] = builder.add_element(p, e->tag, e->attributes);
                builder.element(handle[i]).space_before = e->space_before;
            } else {
                handle[i] = builder.add_text(p, std::get<TextData>(kind).content);
            }
        }
        // Preorder is preserved and no whitespace-only text exists, so the
        // surviving nodes keep their relative order.
        original.push_back(id);
    }
    return PrunedTree{builder.build(), std::move(original)};
}

} // namespace cnr

template <>
struct std::hash<cnr::NodeId> {
    std::size_t operator()(cnr::NodeId n) const noexcept { return std::hash<std::uint32_t>{}(n.value); }
};
