#include <iostream>
#include <string>
#include <vector>

#include "aspec_cli/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return aspec::cli::run_cli(args, std::cout, std::cerr);
}
