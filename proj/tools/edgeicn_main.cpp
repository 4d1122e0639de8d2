#include <iostream>

#include "edgeicn/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return edgeicn::run_cli(args, std::cout, std::cerr);
}
