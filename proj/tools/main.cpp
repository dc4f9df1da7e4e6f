#include "cli.hpp"

int main(int argc, char** argv) { return cauchyhull::cli::run(argc, argv); }
