#include "cli.hpp"

int main(int argc, char** argv) { return park::cli::main(argc, argv); }
