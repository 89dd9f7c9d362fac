#include "apnum/cli.hpp"

int main(int argc, char** argv) { return apnum::cli::run_cli(argc, argv); }
