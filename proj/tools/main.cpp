#include "urf/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return urf::run_cli(argc, argv, std::cout, std::cerr);
}
