#include <iostream>
#include <string>
#include <vector>

#include "newton_chaos/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return newton_chaos::run_cli(args, std::cout, std::cerr);
}
