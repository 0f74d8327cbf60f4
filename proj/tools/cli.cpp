#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "cnr/cnr.hpp"
#include "fetch.hpp"

extern char** environ;

namespace cnr::cli {

namespace {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string input = "-";
    std::string format = "text";
    double quantile = SelectionConfig{}.quantile;
    std::size_t min_candidates = SelectionConfig{}.min_candidates;
    std::string noncontent_tags;
    std::size_t expand_steps = 0;
    std::size_t shrink_steps = 0;
    std::size_t k = 3;
    std::string out;
    bool csv = false;
    int timeout_seconds = 30;
};

void add_selection_options(CLI::App& cmd, Options& o) {
    cmd.add_option("--quantile", o.quantile, "Fraction of candidate nodes ranked below the CNR threshold")
        ->capture_default_str();
    cmd.add_option("--min-candidates", o.min_candidates, "Minimum number of candidate nodes")->capture_default_str();
    cmd.add_option("--noncontent-tags", o.noncontent_tags, "File with one non-content tag per line");
    cmd.add_option("--out", o.out, "Write output to FILE instead of stdout");
}

void add_input_options(CLI::App& cmd, Options& o) {
    cmd.add_option("input", o.input, "HTML file, http(s) URL, or - for stdin")->capture_default_str();
    cmd.add_option("--timeout", o.timeout_seconds, "Fetch timeout in seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_selection_options(cmd, o);
}

void add_granularity_options(CLI::App& cmd, Options& o) {
    cmd.add_option("--expand", o.expand_steps, "Move the extracted node N steps towards the root")
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--shrink", o.shrink_steps, "Move the extracted node N steps into its highest-CNR child")
        ->check(CLI::NonNegativeNumber);
}

bool is_url(const std::string& s) { return s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0; }

std::string read_input(const Options& o, std::istream& in, const Fetcher& fetch) {
    if (is_url(o.input)) {
        try {
            return fetch(o.input, o.timeout_seconds);
        } catch (const std::exception& e) {
            throw IoError(e.what());
        }
    }
    if (o.input == "-") {
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    std::ifstream file(o.input, std::ios::binary);
    if (!file) {
        throw IoError("cannot read " + o.input);
    }
    std::ostringstream ss;
    ss << file.rdbuf();
    return ss.str();
}

ClassifierConfig load_classifier(const Options& o, const Environment& env) {
    std::string file = o.noncontent_tags;
    if (file.empty()) {
        if (const auto it = env.find("CNR_NONCONTENT_TAGS"); it != env.end()) {
            file = it->second;
        }
    }
    if (file.empty()) {
        return {};
    }
    std::ifstream in(file);
    if (!in) {
        throw IoError("cannot read non-content tag list " + file);
    }
    return ClassifierConfig::from_tag_list(in);
}

SelectionConfig selection_of(const Options& o) {
    SelectionConfig config{o.quantile, o.min_candidates};
    config.validate();
    return config;
}

NodeId apply_granularity(const AnnotatedTree& atree, NodeId n, const Options& o) {
    for (std::size_t i = 0; i < o.expand_steps; ++i) {
        n = expand(atree, n);
    }
    for (std::size_t i = 0; i < o.shrink_steps; ++i) {
        n = shrink(atree, n);
    }
    return n;
}

void write_output(const Options& o, std::ostream& out, const std::string& text) {
    if (o.out.empty()) {
        out << text;
        out.flush();
        return;
    }
    std::ofstream file(o.out, std::ios::binary);
    if (!file) {
        throw IoError("cannot write " + o.out);
    }
    file << text;
    if (!file) {
        throw IoError("cannot write " + o.out);
    }
}

std::string with_newline(std::string s) {
    if (s.empty() || s.back() != '\n') {
        s += '\n';
    }
    return s;
}

std::string cmd_extract(const AnnotatedTree& atree, const Options& o) {
    const NodeId main = apply_granularity(atree, extract_main(atree, selection_of(o)), o);
    RenderFormat format = RenderFormat::PlainText;
    if (o.format == "html") {
        format = RenderFormat::HtmlFragment;
    } else if (o.format == "json") {
        format = RenderFormat::JsonReport;
    }
    return with_newline(render(atree, main, format));
}

std::string cmd_annotate(const AnnotatedTree& atree) {
    auto arr = nlohmann::ordered_json::array();
    for (std::uint32_t i = 0; i < atree.tree().size(); ++i) {
        arr.push_back(describe_node(atree, NodeId{i}));
    }
    return with_newline(arr.dump(2));
}

std::string cmd_blocks(const AnnotatedTree& atree, const Options& o) {
    const SelectionConfig config = selection_of(o);
    if (o.k == 0) {
        throw Error(ErrorCode::InvalidArgument, "--k must be positive");
    }
    const BlockSet candidates = select_top_nodes(atree, config);
    const BlockSet blocks = identify_blocks(atree, lift_text_candidates(atree, candidates));
    const NodeId main = select_main_block(atree, blocks);

    nlohmann::ordered_json j;
    j["candidates"] = nlohmann::ordered_json::array();
    for (NodeId n : candidates) {
        j["candidates"].push_back(n.value);
    }
    j["blocks"] = nlohmann::ordered_json::array();
    for (NodeId n : blocks) {
        j["blocks"].push_back(describe_node(atree, n));
    }
    j["main"] = describe_node(atree, main);
    j["selected"] = describe_node(atree, apply_granularity(atree, main, o));
    j["ranked"] = nlohmann::ordered_json::array();
    for (NodeId n : enumerate_blocks(atree, config, o.k)) {
        j["ranked"].push_back(describe_node(atree, n));
    }
    return with_newline(j.dump(2));
}

std::string cmd_menus(const AnnotatedTree& atree) {
    const MenuConfig config;
    const auto stats = compute_link_stats(atree.tree(), config);
    auto arr = nlohmann::ordered_json::array();
    for (NodeId n : detect_menus(atree, config)) {
        auto d = describe_node(atree, n);
        const auto& s = stats[n.value];
        d["links"] = s.links;
        d["lnr"] = s.lnr();
        d["charsPerLink"] = s.chars_per_link();
        d["text"] = render_text(atree, n);
        arr.push_back(std::move(d));
    }
    return with_newline(arr.dump(2));
}

std::string cmd_eval(const Options& o, const Environment& env) {
    const auto dir = std::filesystem::path(o.input);
    if (!std::filesystem::is_directory(dir)) {
        throw IoError(o.input + " is not a directory");
    }
    CorpusResult result;
    try {
        result = run_corpus(dir, selection_of(o), load_classifier(o, env));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ManifestError) {
            throw IoError(e.what());
        }
        throw;
    }
    return o.csv ? to_csv(result) : to_json_lines(result);
}

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return kUsage;
    case ErrorCode::ManifestError:
    case ErrorCode::InputNotDecodable: return kIoError;
    default: return kExtractionFailed;
    }
}

} // namespace

Environment process_environment() {
    Environment env;
    for (char** e = environ; e && *e; ++e) {
        const std::string_view entry(*e);
        const auto eq = entry.find('=');
        if (eq != std::string_view::npos) {
            env.emplace(entry.substr(0, eq), entry.substr(eq + 1));
        }
    }
    return env;
}

int run(const std::vector<std::string>& args, const Environment& env, Streams io, const Fetcher& fetch) {
    CLI::App app{"Main-content extraction by chars-nodes ratio", "cnr"};
    app.require_subcommand(1);
    Options o;

    auto* extract_cmd = app.add_subcommand("extract", "Print the main content block");
    add_input_options(*extract_cmd, o);
    add_granularity_options(*extract_cmd, o);
    extract_cmd->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"html", "text", "json"}))
        ->capture_default_str();

    auto* annotate_cmd = app.add_subcommand("annotate", "Dump per-node CNR annotations as JSON");
    add_input_options(*annotate_cmd, o);

    auto* blocks_cmd = app.add_subcommand("blocks", "List candidate nodes, blocks and ranked blocks as JSON");
    add_input_options(*blocks_cmd, o);
    add_granularity_options(*blocks_cmd, o);
    blocks_cmd->add_option("--k", o.k, "Number of blocks to enumerate")->capture_default_str();

    auto* menus_cmd = app.add_subcommand("menus", "List link-dense menu blocks as JSON");
    add_input_options(*menus_cmd, o);

    auto* eval_cmd = app.add_subcommand("eval", "Score extraction against a gold corpus");
    eval_cmd->add_option("corpus", o.input, "Directory holding gold.json and the pages")->required();
    eval_cmd->add_flag("--csv", o.csv, "Emit a CSV table instead of JSON lines");
    add_selection_options(*eval_cmd, o);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, io.out, io.err);
        return code == 0 ? kOk : kUsage;
    }
    if (o.expand_steps > 0 && o.shrink_steps > 0) {
        io.err << "error: --expand and --shrink cannot both be positive\n";
        return kUsage;
    }

    try {
        std::string output;
        if (eval_cmd->parsed()) {
            output = cmd_eval(o, env);
        } else {
            const ClassifierConfig classifier = load_classifier(o, env);
            selection_of(o);
            const AnnotatedTree atree = compute_cnr(parse_html(read_input(o, io.in, fetch)), classifier);
            if (extract_cmd->parsed()) {
                output = cmd_extract(atree, o);
            } else if (annotate_cmd->parsed()) {
                output = cmd_annotate(atree);
            } else if (blocks_cmd->parsed()) {
                output = cmd_blocks(atree, o);
            } else {
                output = cmd_menus(atree);
            }
        }
        write_output(o, io.out, output);
        return kOk;
    } catch (const IoError& e) {
        io.err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const Error& e) {
        io.err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    }
}

} // namespace cnr::cli
