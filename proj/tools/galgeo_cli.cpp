#include <iostream>
#include <string>
#include <vector>

#include "galgeo/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return galgeo::cli::run(args, std::cout, std::cerr);
}
