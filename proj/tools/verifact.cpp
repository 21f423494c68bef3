#include <iostream>
#include <string>
#include <vector>

#include "verifact/cli/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return verifact::cli::run_cli(args, std::cin, std::cout, std::cerr);
}
