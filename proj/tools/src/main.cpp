#include "effdyn/cli/runner.hpp"

int main(int argc, char** argv) { return effdyn::cli::main_entry(argc, argv); }
