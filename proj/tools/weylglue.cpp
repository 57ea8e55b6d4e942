#include "cli.hpp"

int main(int argc, char** argv) { return weylglue::cli::run(argc, argv, std::cout, std::cerr); }
