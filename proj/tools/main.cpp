#include "sqfree/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return sqfree::cli::run(argc, argv, std::cout, std::cerr);
}
