#include "dckgen/cli.hpp"

int main(int argc, char** argv) { return dckgen::cli_main(argc, argv); }
