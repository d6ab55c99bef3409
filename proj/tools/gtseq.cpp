#include <iostream>

#include "gtseq/cli.hpp"

int main(int argc, char** argv)
{
    return gtseq::run_cli({argv + 1, argv + argc}, std::cin, std::cout, std::cerr);
}
