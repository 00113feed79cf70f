#include "seedsweep/io/cli.hpp"

int main(int argc, char** argv) { return seedsweep::io::cli_main(argc, argv); }
