#include "cli.hpp"

int main(int argc, char** argv) { return cojump::cli::run(argc, argv); }
