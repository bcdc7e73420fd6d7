#include "memlens/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return memlens::run_cli(argc, argv, std::cout, std::cerr);
}
