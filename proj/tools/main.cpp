#include <iostream>
#include <string>
#include <vector>

#include "voltrack_cli/app.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return voltrack::cli::dispatch(args, std::cout, std::cerr);
}
