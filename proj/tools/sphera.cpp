// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#include <iostream>

#include <sphera/cli.hpp>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return sphera::cli::run(std::move(args), std::cout, std::cerr);
}
