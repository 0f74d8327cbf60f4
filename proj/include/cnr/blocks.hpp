#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cnr/dom.hpp"
#include "cnr/error.hpp"
#include "cnr/ratio.hpp"

namespace cnr {

/// A set of nodes of one tree, kept sorted in document order.
class BlockSet {
public:
    BlockSet() = default;

    explicit BlockSet(std::vector<NodeId> members) : members_(std::move(members)) {
        std::sort(members_.begin(), members_.end());
        members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    }

    BlockSet(std::initializer_list<NodeId> members) : BlockSet(std::vector<NodeId>(members)) {}

    const std::vector<NodeId>& members() const noexcept { return members_; }
    auto begin() const noexcept { return members_.begin(); }
    auto end() const noexcept { return members_.end(); }
    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }

    bool contains(NodeId n) const { return std::binary_search(members_.begin(), members_.end(), n); }

    bool operator==(const BlockSet&) const = default;

private:
    std::vector<NodeId> members_;
};

struct SelectionConfig {
    double quantile = 0.90;
    std::size_t min_candidates = 3;

    void validate() const {
        if (!(quantile > 0.0 && quantile <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument, "quantile must be in (0, 1]");
        }
        if (min_candidates == 0) {
            throw Error(ErrorCode::InvalidArgument, "min_candidates must be positive");
        }
    }
};

struct ScoredNode {
    NodeId id;
    double score;
};

/// Linear-interpolation quantile of `values` (which must be non-empty).
inline double quantile_of(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) {
        return values.back();
    }
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

/// Nodes scoring at or above the configured quantile, padded up to
/// min_candidates by descending score (ties: document order).
inline std::vector<NodeId> select_by_quantile(std::vector<ScoredNode> pool, const SelectionConfig& config) {
    config.validate();
    if (pool.empty()) {
        return {};
    }
    std::vector<double> scores;
    scores.reserve(pool.size());
    for (const auto& s : pool) {
        scores.push_back(s.score);
    }
    const double threshold = quantile_of(std::move(scores), config.quantile);
    std::sort(pool.begin(), pool.end(), [](const ScoredNode& a, const ScoredNode& b) {
        return a.score != b.score ? a.score > b.score : a.id < b.id;
    });
    std::size_t take = 0;
    while (take < pool.size() && pool[take].score >= threshold) {
        ++take;
    }
    take = std::max(take, std::min(config.min_candidates, pool.size()));
    std::vector<NodeId> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        out.push_back(pool[i].id);
    }
    return out;
}

/// Text nodes and content elements with a positive ratio, filtered to the
/// highest-CNR ones.
inline BlockSet select_top_nodes(const AnnotatedTree& atree, const SelectionConfig& config = {}) {
    std::vector<ScoredNode> pool;
    for (std::uint32_t i = 0; i < atree.tree().size(); ++i) {
        const NodeId id{i};
        if (atree.counted(id) && atree.node_class(id) != NodeClass::NonContentNode && atree.annotation(id).cnr > 0.0) {
            pool.push_back({id, atree.annotation(id).cnr});
        }
    }
    if (pool.empty()) {
        throw Error(ErrorCode::EmptyDocument, "document contains no countable text");
    }
    return BlockSet(select_by_quantile(std::move(pool), config));
}

namespace detail {

// identify_blocks with optional barrier nodes that never absorb their
// children.
inline BlockSet merge_blocks(const DomTree& tree, const BlockSet& seeds, const std::vector<bool>* barrier) {
    for (NodeId n : seeds) {
        tree.check(n);
    }
    std::set<std::uint32_t> members;
    std::uint32_t covered_end = 0;
    // Seeds are in preorder, so an ancestor always precedes its descendants.
    for (NodeId n : seeds) {
        if (!members.empty() && n.value < covered_end) {
            continue;
        }
        members.insert(n.value);
        covered_end = n.value + static_cast<std::uint32_t>(tree.subtree_size(n));
    }

    std::unordered_map<std::uint32_t, std::size_t> member_children;
    using Entry = std::pair<std::size_t, std::int64_t>; // (depth, -id): max-heap gives deepest, then smallest id
    std::priority_queue<Entry> ready;
    const auto add_member_child = [&](std::uint32_t child) {
        const auto parent = tree.parent(NodeId{child});
        if (!parent) {
            return;
        }
        if (++member_children[parent->value] == 2) {
            ready.push({tree.depth(*parent), -static_cast<std::int64_t>(parent->value)});
        }
    };
    for (auto m : members) {
        add_member_child(m);
    }
    while (!ready.empty()) {
        const auto p = static_cast<std::uint32_t>(-ready.top().second);
        ready.pop();
        auto& count = member_children[p];
        if (count < 2 || (barrier && (*barrier)[p])) {
            continue;
        }
        const NodeId parent{p};
        const auto first = members.lower_bound(p);
        const auto last = members.lower_bound(p + static_cast<std::uint32_t>(tree.subtree_size(parent)));
        for (auto it = first; it != last; ++it) {
            if (auto pp = tree.parent(NodeId{*it})) {
                --member_children[pp->value];
            }
        }
        members.erase(first, last);
        members.insert(p);
        add_member_child(p);
    }
    std::vector<NodeId> out;
    out.reserve(members.size());
    for (auto m : members) {
        out.push_back(NodeId{m});
    }
    return BlockSet(std::move(out));
}

} // namespace detail

/// Drops members that descend from another member, then repeatedly replaces
/// same-parent members by their parent until no two members are siblings.
/// Deeper parents merge first (ties: document order), and descendants of a
/// freshly inserted parent are dropped after each merge.
inline BlockSet identify_blocks(const DomTree& tree, const BlockSet& seeds) {
    return detail::merge_blocks(tree, seeds, nullptr);
}

inline BlockSet identify_blocks(const AnnotatedTree& atree, const BlockSet& seeds) {
    return identify_blocks(atree.tree(), seeds);
}

/// The member with the most text; ties go to the earlier node.
inline NodeId select_main_block(const AnnotatedTree& atree, const BlockSet& blocks) {
    if (blocks.empty()) {
        throw Error(ErrorCode::EmptyBlockSet, "no blocks to choose from");
    }
    NodeId best = *blocks.begin();
    for (NodeId n : blocks) {
        if (atree.annotation(n).text_length > atree.annotation(best).text_length) {
            best = n;
        }
    }
    return best;
}

/// Replaces each text node by its parent element. A text node is a leaf, so
/// the smallest block it can belong to is its container.
inline BlockSet lift_text_candidates(const AnnotatedTree& atree, const BlockSet& seeds) {
    std::vector<NodeId> out;
    out.reserve(seeds.size());
    for (NodeId n : seeds) {
        const auto parent = atree.tree().parent(n);
        out.push_back(atree.tree().is_text(n) && parent ? *parent : n);
    }
    return BlockSet(std::move(out));
}

/// Main content node: top-CNR nodes, lifted to their containers, merged into
/// blocks, and the block with the most text chosen.
inline NodeId extract_main(const AnnotatedTree& atree, const SelectionConfig& config = {}) {
    const BlockSet seeds = lift_text_candidates(atree, select_top_nodes(atree, config));
    return select_main_block(atree, identify_blocks(atree, seeds));
}

inline NodeId expand(const AnnotatedTree& atree, NodeId current) {
    const auto parent = atree.tree().parent(current);
    if (!parent) {
        throw Error(ErrorCode::AtRoot, "the root has no parent");
    }
    return *parent;
}

/// The child with the highest CNR (ties: earlier child).
inline NodeId shrink(const AnnotatedTree& atree, NodeId current) {
    const auto children = atree.tree().children(current);
    if (children.empty()) {
        throw Error(ErrorCode::NoChildren, "node " + std::to_string(current.value) + " is a leaf");
    }
    NodeId best = children.front();
    for (NodeId c : children) {
        if (atree.annotation(c).cnr > atree.annotation(best).cnr) {
            best = c;
        }
    }
    return best;
}

/// Up to k pairwise disjoint blocks in discovery order. After each
/// extraction the chosen subtree is cut from the document and ratios are
/// recomputed on the rest. Nodes enclosing an earlier block are neither
/// candidates nor merge targets. Ids refer to the input tree.
inline std::vector<NodeId> enumerate_blocks(const AnnotatedTree& atree, const SelectionConfig& config, std::size_t k) {
    if (k == 0) {
        throw Error(ErrorCode::InvalidArgument, "k must be positive");
    }
    const DomTree& tree = atree.tree();
    std::vector<NodeId> found;
    found.push_back(extract_main(atree, config));
    std::vector<bool> encloses_found(tree.size(), false);
    while (found.size() < k) {
        for (auto p = tree.parent(found.back()); p && !encloses_found[p->value]; p = tree.parent(*p)) {
            encloses_found[p->value] = true;
        }
        auto rest = prune_subtrees(tree, found);
        if (!rest) {
            break;
        }
        const AnnotatedTree working = compute_cnr(std::move(rest->tree), atree.config());
        const DomTree& wtree = working.tree();
        std::vector<bool> barrier(wtree.size());
        for (std::uint32_t i = 0; i < wtree.size(); ++i) {
            barrier[i] = encloses_found[rest->original[i].value];
        }
        BlockSet top;
        try {
            top = select_top_nodes(working, config);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::EmptyDocument) {
                throw;
            }
            break;
        }
        std::vector<NodeId> seeds;
        for (NodeId n : top) {
            if (barrier[n.value]) {
                continue;
            }
            const auto parent = wtree.parent(n);
            seeds.push_back(wtree.is_text(n) && parent && !barrier[parent->value] ? *parent : n);
        }
        if (seeds.empty()) {
            break;
        }
        const BlockSet blocks = detail::merge_blocks(wtree, BlockSet(std::move(seeds)), &barrier);
        found.push_back(rest->original[select_main_block(working, blocks).value]);
    }
    return found;
}

struct MenuConfig {
    double lnr_threshold = 0.5;
    double max_chars_per_link = 25.0;
    std::string link_tag = "a";
};

/// Link density of one subtree. Link elements count as a single node.
struct LinkStats {
    std::uint64_t weight = 1;
    std::uint64_t links = 0;
    std::uint64_t link_chars = 0;

    double lnr() const { return static_cast<double>(links) / static_cast<double>(weight); }
    double chars_per_link() const {
        return links == 0 ? 0.0 : static_cast<double>(link_chars) / static_cast<double>(links);
    }
};

inline std::vector<LinkStats> compute_link_stats(const DomTree& tree, const MenuConfig& config = {}) {
    const std::size_t n = tree.size();
    std::vector<LinkStats> stats(n);
    // Text length under each node, used for the characters of each link.
    std::vector<std::uint64_t> chars(n, 0);
    for (std::size_t i = n; i-- > 0;) {
        const NodeId id{static_cast<std::uint32_t>(i)};
        if (tree.is_text(id)) {
            chars[i] = text_length(tree.text(id));
            continue;
        }
        for (NodeId c : tree.children(id)) {
            chars[i] += chars[c.value];
        }
        if (tree.tag(id) == config.link_tag) {
            stats[i] = LinkStats{1, 1, chars[i]};
            continue;
        }
        LinkStats s;
        for (NodeId c : tree.children(id)) {
            s.weight += stats[c.value].weight;
            s.links += stats[c.value].links;
            s.link_chars += stats[c.value].link_chars;
        }
        stats[i] = s;
    }
    return stats;
}

/// Experimental: concentrations of short links, merged into blocks.
inline BlockSet detect_menus(const AnnotatedTree& atree, const MenuConfig& config = {}) {
    const DomTree& tree = atree.tree();
    const auto stats = compute_link_stats(tree, config);
    std::vector<NodeId> seeds;
    for (std::uint32_t i = 0; i < tree.size(); ++i) {
        const NodeId id{i};
        const LinkStats& s = stats[i];
        if (tree.is_element(id) && tree.tag(id) != config.link_tag && s.links > 0 && s.lnr() >= config.lnr_threshold &&
            s.chars_per_link() <= config.max_chars_per_link) {
            seeds.push_back(id);
        }
    }
    return identify_blocks(tree, BlockSet(std::move(seeds)));
}

} // namespace cnr
