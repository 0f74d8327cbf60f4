#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cnr/dom.hpp"
#include "cnr/text.hpp"

namespace cnr {

/// weight: nodes counted in the subtree; text_length: non-whitespace
/// characters; cnr: text_length / weight.
struct NodeAnnotation {
    std::uint64_t weight = 1;
    std::uint64_t text_length = 0;
    double cnr = 0.0;

    bool operator==(const NodeAnnotation&) const = default;
};

/// A DomTree together with the per-node chars-nodes ratios computed for a
/// given classifier.
class AnnotatedTree {
public:
    AnnotatedTree(DomTree tree, ClassifierConfig config, std::vector<NodeAnnotation> annotations,
                  std::vector<NodeClass> classes, std::vector<bool> counted)
        : tree_(std::move(tree)), config_(std::move(config)), annotations_(std::move(annotations)),
          classes_(std::move(classes)), counted_(std::move(counted)) {}

    const DomTree& tree() const noexcept { return tree_; }
    const ClassifierConfig& config() const noexcept { return config_; }

    const NodeAnnotation& annotation(NodeId n) const { return tree_.check(n), annotations_[n.value]; }
    const std::vector<NodeAnnotation>& annotations() const noexcept { return annotations_; }

    NodeClass node_class(NodeId n) const { return tree_.check(n), classes_[n.value]; }

    /// False for nodes strictly inside a non-content subtree. Those carry the
    /// placeholder annotation (1, 0, 0) and contribute nothing upward.
    bool counted(NodeId n) const { return tree_.check(n), counted_[n.value]; }

private:
    DomTree tree_;
    ClassifierConfig config_;
    std::vector<NodeAnnotation> annotations_;
    std::vector<NodeClass> classes_;
    std::vector<bool> counted_;
};

struct ComputeStats {
    std::size_t visits = 0;
};

/// Annotates every node in one bottom-up sweep. Text nodes get
/// (1, len, len); non-content elements get (1, 0, 0) and hide their
/// descendants; any other element sums its children's weights (plus itself)
/// and text lengths.
inline AnnotatedTree compute_cnr(DomTree tree, ClassifierConfig config = {}, ComputeStats* stats = nullptr) {
    const std::size_t n = tree.size();
    std::vector<NodeClass> classes(n);
    std::vector<bool> counted(n, true);
    // Preorder ids: every parent precedes its children.
    for (std::uint32_t i = 0; i < n; ++i) {
        const NodeId id{i};
        classes[i] = classify(tree, id, config);
        if (i != 0) {
            const auto p = tree.parent(id)->value;
            counted[i] = counted[p] && classes[p] != NodeClass::NonContentNode;
        }
    }
    std::vector<NodeAnnotation> annotations(n);
    // Reverse preorder visits children before their parent.
    for (std::size_t i = n; i-- > 0;) {
        const NodeId id{static_cast<std::uint32_t>(i)};
        NodeAnnotation& a = annotations[i];
        if (stats) {
            ++stats->visits;
        }
        if (!counted[i]) {
            a = NodeAnnotation{};
            continue;
        }
        switch (classes[i]) {
        case NodeClass::TextNode: {
            const auto len = text_length(tree.text(id));
            a = NodeAnnotation{1, len, static_cast<double>(len)};
            break;
        }
        case NodeClass::NonContentNode:
            a = NodeAnnotation{};
            break;
        case NodeClass::ContentElement: {
            std::uint64_t weight = 1;
            std::uint64_t chars = 0;
            for (NodeId child : tree.children(id)) {
                weight += annotations[child.value].weight;
                chars += annotations[child.value].text_length;
            }
            a = NodeAnnotation{weight, chars, static_cast<double>(chars) / static_cast<double>(weight)};
            break;
        }
        }
    }
    return AnnotatedTree(std::move(tree), std::move(config), std::move(annotations), std::move(classes),
                         std::move(counted));
}

inline double cnr_of(const AnnotatedTree& atree, NodeId n) { return atree.annotation(n).cnr; }

} // namespace cnr
