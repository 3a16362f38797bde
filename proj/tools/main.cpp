#include <iostream>
#include <string>
#include <vector>

#include "precflex/cli/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return precflex::cli::dispatch(args, std::cout, std::cerr);
}
