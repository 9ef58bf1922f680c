#include "lfdrshrink/cli.hpp"

int main(int argc, char** argv) { return lfdrshrink::cli_main(argc, argv); }
