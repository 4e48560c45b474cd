#include "toxblend/cli/commands.hpp"

int main(int argc, char** argv) { return toxblend::cli::run_cli(argc, argv); }
