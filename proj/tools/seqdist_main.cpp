#include "seqdist/cli.hpp"

int main(int argc, char** argv) { return seqdist::cli::run(argc, argv); }
