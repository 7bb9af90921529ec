#include "expander/cli.hpp"

int main(int argc, char** argv) { return expander::cli::run_cli(argc, argv); }
