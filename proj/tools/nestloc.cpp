#include <iostream>

#include <nestloc/cli.hpp>

int main(int argc, char **argv)
{
    return nestloc::run_cli(argc, argv, std::cout, std::cerr);
}
