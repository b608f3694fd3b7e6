#include "cli.hpp"

int main(int argc, char** argv) { return robot::cli::run(argc, argv, std::cout, std::cerr); }
