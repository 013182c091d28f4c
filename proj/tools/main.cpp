#include "attnsim/cli.hpp"

int main(int argc, char** argv) { return attnsim::run_cli(argc, argv); }
