#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <string>

#include "cnr/blocks.hpp"
#include "cnr/eval.hpp"
#include "cnr/html_parser.hpp"
#include "cnr/path.hpp"
#include "support.hpp"

namespace cnr {
namespace {

using testing::find_by_id;

AnnotatedTree load_fixture(const char* name) {
    return compute_cnr(parse_html(testing::slurp(testing::fixture_dir() / name)));
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::InputNotDecodable;
}

// Sort-and-slice: everything at or above the threshold, topped up to the floor.
std::vector<NodeId> slice_oracle(std::vector<ScoredNode> pool, double threshold, std::size_t floor) {
    std::stable_sort(pool.begin(), pool.end(), [](const ScoredNode& a, const ScoredNode& b) {
        return a.score > b.score || (a.score == b.score && a.id < b.id);
    });
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (pool[i].score >= threshold || out.size() < floor) {
            out.push_back(pool[i].id);
        }
    }
    return out;
}

TEST(QuantileOf, InterpolatesLinearly) {
    EXPECT_DOUBLE_EQ(quantile_of({1, 1, 1, 8, 10}, 0.8), 8.4);
    EXPECT_DOUBLE_EQ(quantile_of({3, 1, 2}, 0.5), 2.0);
    EXPECT_DOUBLE_EQ(quantile_of({4}, 0.9), 4.0);
    EXPECT_DOUBLE_EQ(quantile_of({1, 2, 3, 4}, 1.0), 4.0);
}

TEST(SelectByQuantile, PadsToMinimumCandidates) {
    std::vector<ScoredNode> pool{{NodeId{0}, 10}, {NodeId{1}, 8}, {NodeId{2}, 1}, {NodeId{3}, 1}, {NodeId{4}, 1}};
    SelectionConfig config;
    config.quantile = 0.8;
    EXPECT_EQ(select_by_quantile(pool, config), (std::vector<NodeId>{NodeId{0}, NodeId{1}, NodeId{2}}));
    config.min_candidates = 1;
    EXPECT_EQ(select_by_quantile(pool, config), std::vector<NodeId>{NodeId{0}});
}

TEST(SelectByQuantile, MatchesSortAndSliceOracle) {
    std::mt19937_64 rng(53);
    for (int i = 0; i < 500; ++i) {
        const auto size = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
        std::vector<ScoredNode> pool;
        std::vector<double> scores;
        for (std::size_t j = 0; j < size; ++j) {
            const double s = std::uniform_int_distribution<int>(1, 12)(rng) / 4.0;
            pool.push_back({NodeId{static_cast<std::uint32_t>(j)}, s});
            scores.push_back(s);
        }
        SelectionConfig config;
        config.quantile = std::uniform_int_distribution<int>(1, 10)(rng) / 10.0;
        config.min_candidates = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
        std::sort(scores.begin(), scores.end());
        const double h = (scores.size() - 1) * config.quantile;
        const auto lo = static_cast<std::size_t>(h);
        const double threshold =
            lo + 1 < scores.size() ? scores[lo] + (h - lo) * (scores[lo + 1] - scores[lo]) : scores.back();
        ASSERT_EQ(select_by_quantile(pool, config), slice_oracle(pool, threshold, config.min_candidates));
    }
}

TEST(SelectionConfig, RejectsOutOfRangeValues) {
    for (double q : {0.0, -0.1, 1.5}) {
        SelectionConfig config;
        config.quantile = q;
        EXPECT_EQ(code_of([&] { config.validate(); }), ErrorCode::InvalidArgument);
    }
    SelectionConfig config;
    config.min_candidates = 0;
    EXPECT_EQ(code_of([&] { config.validate(); }), ErrorCode::InvalidArgument);
}

TEST(SelectTopNodes, AllZeroRatiosIsEmptyDocument) {
    const AnnotatedTree a = compute_cnr(parse_html("<div><img src=x><script>code()</script></div>"));
    EXPECT_EQ(code_of([&] { select_top_nodes(a); }), ErrorCode::EmptyDocument);
    EXPECT_EQ(code_of([&] { extract_main(a); }), ErrorCode::EmptyDocument);
}

TEST(SelectTopNodes, SingleTextNodeDocument) {
    DomTreeBuilder b;
    const auto root = b.add_root("p");
    b.add_text(root, "hello");
    const AnnotatedTree a = compute_cnr(b.build());
    SelectionConfig config;
    config.min_candidates = 1;
    EXPECT_EQ(select_top_nodes(a, config), BlockSet{NodeId{1}});
    EXPECT_EQ(extract_main(a, config), NodeId{0});
}

TEST(SelectTopNodes, NeverPicksNonContentOrHiddenNodes) {
    std::mt19937_64 rng(59);
    for (int i = 0; i < 300; ++i) {
        const AnnotatedTree a = compute_cnr(testing::random_tree(rng));
        try {
            for (NodeId n : select_top_nodes(a)) {
                ASSERT_TRUE(a.counted(n));
                ASSERT_NE(a.node_class(n), NodeClass::NonContentNode);
                ASSERT_GT(a.annotation(n).cnr, 0.0);
            }
        } catch (const Error& e) {
            ASSERT_EQ(e.code(), ErrorCode::EmptyDocument);
            ASSERT_EQ(a.annotation(a.tree().root()).text_length, 0u);
        }
    }
}

TEST(IdentifyBlocks, WikiLayoutMergesToContentAndFooter) {
    const AnnotatedTree a = load_fixture("wiki_layout.html");
    const DomTree& t = a.tree();
    const BlockSet s{find_by_id(t, "catlinks"), find_by_id(t, "intro"), find_by_id(t, "see-also-1"),
                     find_by_id(t, "see-also-2"), find_by_id(t, "footer")};
    const BlockSet blocks = identify_blocks(a, s);
    EXPECT_EQ(blocks, (BlockSet{find_by_id(t, "content"), find_by_id(t, "footer")}));
    EXPECT_EQ(select_main_block(a, blocks), find_by_id(t, "content"));
}

TEST(IdentifyBlocks, DescendantOfMemberIsDropped) {
    const AnnotatedTree a = load_fixture("wiki_layout.html");
    const DomTree& t = a.tree();
    const NodeId n = find_by_id(t, "bodyContent");
    EXPECT_EQ(identify_blocks(a, BlockSet{n, find_by_id(t, "see-also-2")}), BlockSet{n});
}

TEST(IdentifyBlocks, SingleLeafIsAFixPoint) {
    const AnnotatedTree a = load_fixture("wiki_layout.html");
    const NodeId leaf = find_by_id(a.tree(), "see-also-1");
    EXPECT_EQ(identify_blocks(a, BlockSet{leaf}), BlockSet{leaf});
    EXPECT_EQ(identify_blocks(a, BlockSet{}), BlockSet{});
}

TEST(IdentifyBlocks, CascadingMergesReachTheCommonContainer) {
    const AnnotatedTree a = compute_cnr(parse_html("<div><p>a<b>b</b></p><ul><li>c</li><li>d</li></ul></div>"));
    const DomTree& t = a.tree();
    const NodeId div = t.children(resolve_path(t, "/1"))[0];
    const NodeId p = t.children(div)[0];
    const NodeId ul = t.children(div)[1];
    const BlockSet s{t.children(p)[1], t.children(ul)[0], t.children(ul)[1], p};
    EXPECT_EQ(identify_blocks(a, s), BlockSet{div});
}

TEST(IdentifyBlocks, RejectsUnknownNode) {
    const AnnotatedTree a = compute_cnr(parse_html("<p>x</p>"));
    EXPECT_EQ(code_of([&] { identify_blocks(a, BlockSet{NodeId{500}}); }), ErrorCode::UnknownNode);
}

TEST(IdentifyBlocks, OutputIsAnIdempotentAntichainWithoutSiblings) {
    std::mt19937_64 rng(61);
    for (int i = 0; i < 500; ++i) {
        const DomTree t = testing::random_tree(rng);
        const BlockSet blocks = identify_blocks(t, testing::random_block_set(rng, t));
        ASSERT_FALSE(blocks.empty());
        for (NodeId x : blocks) {
            for (NodeId y : blocks) {
                if (x == y) {
                    continue;
                }
                ASSERT_FALSE(is_ancestor(t, x, y));
                ASSERT_NE(t.parent(x), t.parent(y));
            }
        }
        ASSERT_EQ(identify_blocks(t, blocks), blocks);
    }
}

TEST(IdentifyBlocks, EveryOutputCoversSomeSeedAndEverySeedIsCovered) {
    std::mt19937_64 rng(67);
    for (int i = 0; i < 300; ++i) {
        const DomTree t = testing::random_tree(rng);
        const BlockSet seeds = testing::random_block_set(rng, t);
        const BlockSet blocks = identify_blocks(t, seeds);
        for (NodeId s : seeds) {
            ASSERT_TRUE(std::any_of(blocks.begin(), blocks.end(), [&](NodeId b) { return is_ancestor(t, b, s); }));
        }
        for (NodeId b : blocks) {
            ASSERT_TRUE(std::any_of(seeds.begin(), seeds.end(), [&](NodeId s) { return is_ancestor(t, b, s); }));
        }
    }
}

TEST(SelectMainBlock, PicksTheBlockWithMostText) {
    const std::string a_text(500, 'a');
    const std::string b_text(120, 'b');
    const AnnotatedTree a = compute_cnr(parse_html("<div id=A><p>" + a_text + "</p></div><div id=B>" + b_text + "</div>"));
    const NodeId big = find_by_id(a.tree(), "A");
    const NodeId small = find_by_id(a.tree(), "B");
    EXPECT_EQ(select_main_block(a, BlockSet{small, big}), big);
    EXPECT_EQ(select_main_block(a, BlockSet{small}), small);
}

TEST(SelectMainBlock, TiesGoToTheEarlierNode) {
    const AnnotatedTree a = compute_cnr(parse_html("<div id=A>same</div><div id=B>text</div>"));
    const NodeId first = find_by_id(a.tree(), "A");
    const NodeId second = find_by_id(a.tree(), "B");
    EXPECT_EQ(select_main_block(a, BlockSet{second, first}), first);
}

TEST(SelectMainBlock, EmptySetIsAnError) {
    const AnnotatedTree a = compute_cnr(parse_html("<p>x</p>"));
    EXPECT_EQ(code_of([&] { select_main_block(a, BlockSet{}); }), ErrorCode::EmptyBlockSet);
}

TEST(SelectMainBlock, WikiLayoutFooterIsDiscarded) {
    const AnnotatedTree a = load_fixture("wiki_layout.html");
    const NodeId content = find_by_id(a.tree(), "content");
    const NodeId footer = find_by_id(a.tree(), "footer");
    EXPECT_GT(a.annotation(content).text_length, a.annotation(footer).text_length);
    EXPECT_EQ(select_main_block(a, BlockSet{content, footer}), content);
}

TEST(LiftTextCandidates, ReplacesTextByItsContainer) {
    const AnnotatedTree a = compute_cnr(parse_html("<div><p>abc</p></div>"));
    const NodeId div = a.tree().children(resolve_path(a.tree(), "/1"))[0];
    const NodeId p = a.tree().children(div)[0];
    const NodeId text = a.tree().children(p)[0];
    EXPECT_EQ(lift_text_candidates(a, BlockSet{text, div}), (BlockSet{div, p}));
}

TEST(ExtractMain, WikipediaSnippetSelectsTheArticleText) {
    const AnnotatedTree a = load_fixture("wiki_snippet.html");
    const DomTree& t = a.tree();
    const NodeId content = find_by_id(t, "content");
    const NodeId main = extract_main(a);
    EXPECT_TRUE(is_ancestor(t, content, main));
    EXPECT_EQ(a.annotation(main).text_length, a.annotation(content).text_length);
    NodeId widened = main;
    while (widened != content) {
        widened = expand(a, widened);
    }
    EXPECT_EQ(widened, content);
}

TEST(ExtractMain, SingleParagraphPageReturnsAnAncestorOfTheText) {
    const AnnotatedTree a = compute_cnr(parse_html("<p>Just one paragraph of text on this page.</p>"));
    const NodeId main = extract_main(a);
    const NodeId p = a.tree().children(resolve_path(a.tree(), "/1"))[0];
    EXPECT_TRUE(is_ancestor(a.tree(), main, p));
}

TEST(ExtractMain, AdjacentFooterInAnotherDivIsExcluded) {
    const AnnotatedTree a = compute_cnr(parse_html(
        "<div id=main><h2>Title</h2>"
        "<p>The first paragraph of the article explains the topic at some length so that it dominates.</p>"
        "<p>The second paragraph continues with further details and examples for the reader to study.</p>"
        "<p>The third paragraph closes the argument and summarises what has been said before.</p></div>"
        "<div id=footer>Copyright 2011 Example Corporation. All rights reserved worldwide.</div>"));
    const NodeId main = extract_main(a);
    const NodeId footer = find_by_id(a.tree(), "footer");
    EXPECT_EQ(main, find_by_id(a.tree(), "main"));
    EXPECT_FALSE(is_ancestor(a.tree(), main, footer));
}

TEST(ExtractMain, ResultHasAtLeastTheTextOfEveryOtherBlock) {
    std::mt19937_64 rng(71);
    for (int i = 0; i < 300; ++i) {
        const AnnotatedTree a = compute_cnr(testing::random_tree(rng));
        if (a.annotation(a.tree().root()).text_length == 0) {
            continue;
        }
        const BlockSet blocks = identify_blocks(a, lift_text_candidates(a, select_top_nodes(a)));
        const NodeId main = extract_main(a);
        ASSERT_TRUE(blocks.contains(main));
        for (NodeId b : blocks) {
            ASSERT_GE(a.annotation(main).text_length, a.annotation(b).text_length);
        }
        ASSERT_EQ(extract_main(a), main);
    }
}

TEST(ExtractMain, ResultAndGoldAreNestedOrDisjoint) {
    std::mt19937_64 rng(73);
    for (int i = 0; i < 300; ++i) {
        const AnnotatedTree a = compute_cnr(testing::random_tree(rng));
        if (a.annotation(a.tree().root()).text_length == 0) {
            continue;
        }
        const DomTree& t = a.tree();
        const NodeId b = extract_main(a);
        const NodeId g = testing::random_node(rng, t);
        const auto rs = testing::walk_subtree(t, b);
        const auto gs = testing::walk_subtree(t, g);
        std::vector<std::uint32_t> common;
        std::set_intersection(rs.begin(), rs.end(), gs.begin(), gs.end(), std::back_inserter(common));
        const EvalReport r = score(t, b, g);
        if (is_ancestor(t, b, g)) {
            ASSERT_EQ(r.recall, 1.0);
        } else if (is_ancestor(t, g, b)) {
            ASSERT_EQ(r.precision, 1.0);
        } else {
            ASSERT_TRUE(common.empty());
        }
    }
}

TEST(Expand, MovesToTheParent) {
    const AnnotatedTree a = load_fixture("wiki_snippet.html");
    const NodeId content = find_by_id(a.tree(), "content");
    EXPECT_EQ(expand(a, content), resolve_path(a.tree(), "/1"));
    EXPECT_EQ(a.tree().tag(expand(a, content)), "body");
}

TEST(Expand, RootIsAnError) {
    const AnnotatedTree a = load_fixture("wiki_snippet.html");
    EXPECT_EQ(code_of([&] { expand(a, a.tree().root()); }), ErrorCode::AtRoot);
}

TEST(Shrink, PicksTheHighestRatioChild) {
    const AnnotatedTree a = load_fixture("wiki_snippet.html");
    EXPECT_EQ(shrink(a, resolve_path(a.tree(), "/1")), find_by_id(a.tree(), "content"));
}

TEST(Shrink, LeafIsAnError) {
    const AnnotatedTree a = compute_cnr(parse_html("<p>x</p>"));
    const NodeId text{static_cast<std::uint32_t>(a.tree().size() - 1)};
    EXPECT_EQ(code_of([&] { shrink(a, text); }), ErrorCode::NoChildren);
}

TEST(Shrink, SingleChildIsReturned) {
    const AnnotatedTree a = compute_cnr(parse_html("<div><img src=x></div>"));
    const NodeId div = a.tree().children(resolve_path(a.tree(), "/1"))[0];
    EXPECT_EQ(shrink(a, div), a.tree().children(div)[0]);
}

TEST(Shrink, TiesGoToTheEarlierChild) {
    const AnnotatedTree a = compute_cnr(parse_html("<div><p>ab</p><p>cd</p></div>"));
    const NodeId div = a.tree().children(resolve_path(a.tree(), "/1"))[0];
    EXPECT_EQ(shrink(a, div), a.tree().children(div)[0]);
}

TEST(EnumerateBlocks, FirstIsExtractMain) {
    const AnnotatedTree a = load_fixture("wiki_snippet.html");
    EXPECT_EQ(enumerate_blocks(a, {}, 1), std::vector<NodeId>{extract_main(a)});
}

TEST(EnumerateBlocks, WikipediaSnippetSecondBlockIsTheFooter) {
    const AnnotatedTree a = load_fixture("wiki_snippet.html");
    const DomTree& t = a.tree();
    const auto found = enumerate_blocks(a, {}, 2);
    ASSERT_EQ(found.size(), 2u);
    EXPECT_TRUE(is_ancestor(t, find_by_id(t, "content"), found[0]));
    EXPECT_EQ(found[1], find_by_id(t, "footer"));
}

TEST(EnumerateBlocks, StopsWhenTextRunsOut) {
    const AnnotatedTree a = compute_cnr(parse_html("<div><p>only text here</p></div><img src=x>"));
    const auto found = enumerate_blocks(a, {}, 10);
    EXPECT_GE(found.size(), 1u);
    EXPECT_LT(found.size(), 10u);
}

TEST(EnumerateBlocks, ZeroIsAnError) {
    const AnnotatedTree a = load_fixture("wiki_snippet.html");
    EXPECT_EQ(code_of([&] { enumerate_blocks(a, {}, 0); }), ErrorCode::InvalidArgument);
}

TEST(EnumerateBlocks, ResultsAreDisjointOnRandomTrees) {
    std::mt19937_64 rng(79);
    for (int i = 0; i < 200; ++i) {
        const AnnotatedTree a = compute_cnr(testing::random_tree(rng));
        if (a.annotation(a.tree().root()).text_length == 0) {
            continue;
        }
        const auto found = enumerate_blocks(a, {}, 4);
        ASSERT_EQ(found.front(), extract_main(a));
        for (std::size_t x = 0; x < found.size(); ++x) {
            for (std::size_t y = x + 1; y < found.size(); ++y) {
                ASSERT_FALSE(is_ancestor(a.tree(), found[x], found[y]));
                ASSERT_FALSE(is_ancestor(a.tree(), found[y], found[x]));
            }
        }
    }
}

TEST(DetectMenus, ShortLinkListIsDetected) {
    const AnnotatedTree a = compute_cnr(parse_html(
        "<div><p>Some ordinary paragraph text that is not a menu at all.</p>"
        "<ul id=menu><li><a href=/>Home</a></li><li><a href=/news>News</a></li><li><a href=/sport>Sport</a></li>"
        "<li><a href=/tv>TV</a></li><li><a href=/about>About us</a></li></ul></div>"));
    const NodeId menu = find_by_id(a.tree(), "menu");
    EXPECT_EQ(detect_menus(a), BlockSet{menu});
    const auto stats = compute_link_stats(a.tree());
    EXPECT_EQ(stats[menu.value].links, 5u);
    EXPECT_EQ(stats[menu.value].weight, 11u);
    EXPECT_DOUBLE_EQ(stats[menu.value].chars_per_link(), 22.0 / 5.0);
}

TEST(DetectMenus, LongInlineLinksInAnArticleAreNotAMenu) {
    std::string words;
    for (int i = 0; i < 400; ++i) {
        words += "word" + std::to_string(i % 10) + ' ';
    }
    const AnnotatedTree a = compute_cnr(parse_html(
        "<div><p>" + words.substr(0, words.size() / 2) +
        "<a href=/a>a long descriptive link to the first related article</a> " + words.substr(words.size() / 2) +
        "<a href=/b>another long descriptive link to a second related article</a></p></div>"));
    EXPECT_TRUE(detect_menus(a).empty());
}

TEST(DetectMenus, NoAnchorsMeansNoMenus) {
    const AnnotatedTree a = load_fixture("wiki_layout.html");
    MenuConfig config;
    config.link_tag = "blink";
    EXPECT_TRUE(detect_menus(a, config).empty());
    const AnnotatedTree plain = compute_cnr(parse_html("<div><p>a</p><ul><li>b</li></ul></div>"));
    EXPECT_TRUE(detect_menus(plain).empty());
}

TEST(Determinism, SameInputSameResult) {
    for (const auto& entry : std::filesystem::directory_iterator(testing::corpus_dir())) {
        if (entry.path().extension() != ".html") {
            continue;
        }
        const std::string html = testing::slurp(entry.path());
        const AnnotatedTree a = compute_cnr(parse_html(html));
        const AnnotatedTree b = compute_cnr(parse_html(html));
        EXPECT_EQ(extract_main(a), extract_main(b)) << entry.path();
        EXPECT_EQ(enumerate_blocks(a, {}, 3), enumerate_blocks(b, {}, 3)) << entry.path();
        EXPECT_EQ(detect_menus(a), detect_menus(b)) << entry.path();
    }
}

} // namespace
} // namespace cnr
