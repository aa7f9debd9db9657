#include "cli.hpp"

int main(int argc, char** argv) { return selint::cli::cli_main(argc, argv); }
