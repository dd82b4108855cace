#include "stlsbb/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return stlsbb::run_cli(argc, argv, std::cout, std::cerr);
}
