#include <iostream>

#include "seatrack/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return seatrack::cli::run(args, std::cout, std::cerr);
}
