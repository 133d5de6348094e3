#include "indi/cli.hpp"

int main(int argc, char** argv) { return indi::run_cli(argc, argv); }
