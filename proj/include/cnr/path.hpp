#pragma once

#include <algorithm>
#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "cnr/dom.hpp"
#include "cnr/error.hpp"

namespace cnr {

/// Child-index path from the root, e.g. "/0/1/2". The root itself is "/".
inline std::string node_path(const DomTree& tree, NodeId n) {
    std::vector<std::size_t> steps;
    for (auto cur = n, parent = n; tree.parent(cur); cur = parent) {
        parent = *tree.parent(cur);
        const auto siblings = tree.children(parent);
        steps.push_back(static_cast<std::size_t>(std::find(siblings.begin(), siblings.end(), cur) - siblings.begin()));
    }
    if (steps.empty()) {
        return "/";
    }
    std::string out;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        out += '/';
        out += std::to_string(*it);
    }
    return out;
}

/// Resolves a slash-separated path from the root. A numeric segment selects
/// a child by index. A "tag#id" segment selects the unique descendant of the
/// current node with that id attribute and tag ("*" or empty tag matches any
/// element).
inline NodeId resolve_path(const DomTree& tree, std::string_view path) {
    if (path.empty() || path.front() != '/') {
        throw Error(ErrorCode::BadPath, "path must start with '/': " + std::string(path));
    }
    NodeId cur = tree.root();
    std::size_t pos = 1;
    while (pos <= path.size()) {
        const std::size_t slash = std::min(path.find('/', pos), path.size());
        const std::string_view seg = path.substr(pos, slash - pos);
        pos = slash + 1;
        if (seg.empty()) {
            continue;
        }
        const auto hash = seg.find('#');
        if (hash == std::string_view::npos) {
            std::size_t index = 0;
            const auto [end, ec] = std::from_chars(seg.data(), seg.data() + seg.size(), index);
            if (ec != std::errc() || end != seg.data() + seg.size()) {
                throw Error(ErrorCode::BadPath, "bad segment '" + std::string(seg) + "' in " + std::string(path));
            }
            const auto kids = tree.children(cur);
            if (index >= kids.size()) {
                throw Error(ErrorCode::BadPath, "child index out of range in " + std::string(path));
            }
            cur = kids[index];
            continue;
        }
        const std::string_view tag = seg.substr(0, hash);
        const std::string_view id = seg.substr(hash + 1);
        std::vector<NodeId> matches;
        for (NodeId n : tree.subtree_nodes(cur)) {
            if (n == cur || !tree.is_element(n)) {
                continue;
            }
            if ((tag.empty() || tag == "*" || tree.tag(n) == tag) && tree.attribute(n, "id") == id) {
                matches.push_back(n);
            }
        }
        if (matches.size() != 1) {
            throw Error(ErrorCode::BadPath, std::to_string(matches.size()) + " nodes match '" + std::string(seg) +
                                                "' in " + std::string(path));
        }
        cur = matches.front();
    }
    return cur;
}

} // namespace cnr
