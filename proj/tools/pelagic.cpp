#include "pelagic/cli.hpp"

int main(int argc, char** argv) { return pelagic::cli::cli_dispatch(argc, argv); }
