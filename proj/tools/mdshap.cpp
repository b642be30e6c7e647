#include <iostream>

#include "mdshap/cli.hpp"

int main(int argc, char** argv) {
    return mdshap::cli::run(argc, argv, std::cout, std::cerr);
}
