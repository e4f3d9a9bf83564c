#include "modq/cli.hpp"

int main(int argc, char** argv) { return modq::cli::main(argc, argv); }
