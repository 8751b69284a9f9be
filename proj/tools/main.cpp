#include "cli.hpp"

int main(int argc, char** argv) { return latticeforge::cli::run(argc, argv); }
