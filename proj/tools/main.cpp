#include "cli.hpp"

int main(int argc, char** argv) { return kplate::cli::main(argc, argv); }
