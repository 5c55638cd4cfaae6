#include <iostream>
#include <string>
#include <vector>

#include "depsel/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return depsel::cli::run(args, std::cout, std::cerr);
}
