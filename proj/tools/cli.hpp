#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace cnr::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kExtractionFailed = 2,
    kIoError = 3,
};

using Environment = std::map<std::string, std::string>;
using Fetcher = std::function<std::string(const std::string& url, int timeout_seconds)>;

struct Streams {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
};

/// Runs the command line `args` (program name excluded) and returns the exit
/// code. `fetch` is used for http(s) inputs.
int run(const std::vector<std::string>& args, const Environment& env, Streams io, const Fetcher& fetch);

Environment process_environment();

} // namespace cnr::cli
