#include "kgmp/cli.hpp"

int main(int argc, char** argv) { return kgmp::cli_main(argc, argv); }
