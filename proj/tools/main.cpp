#include <iostream>

#include "dimer_cli/cli.hpp"

int main(int argc, char** argv) {
    return dimer::cli::run(argc, argv, std::cout, std::cerr);
}
