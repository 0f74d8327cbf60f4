#include <iostream>

#include "cli.hpp"
#include "fetch.hpp"

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    const std::vector<std::string> args(argv + 1, argv + argc);
    return cnr::cli::run(args, cnr::cli::process_environment(), {std::cin, std::cout, std::cerr}, cnr::cli::fetch_url);
}
