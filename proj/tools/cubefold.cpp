#include "cubefold/cli.hpp"

int main(int argc, char** argv) { return cubefold::run_cli(argc, argv); }
