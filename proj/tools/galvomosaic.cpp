#include "galvomosaic/cli_commands.hpp"

int main(int argc, char** argv) { return galvomosaic::cli::run(argc, argv); }
