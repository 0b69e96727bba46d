// SPDX-License-Identifier: Apache-2.0
//! \file tools/main.cpp
#include <iostream>
#include <string>
#include <vector>

#include <photoion/cli.hpp>

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return photoion::cli::run(args, std::cout, std::cerr, std::cin);
}
