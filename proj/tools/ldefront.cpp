#include "cli/run.hpp"

int main(int argc, char** argv) { return lde::cli::run(argc, argv); }
