#include <iostream>

#include "horizon/cli.hpp"

int main(int argc, char** argv) {
    return horizon::run_cli(argc, argv, std::cout, std::cerr);
}
