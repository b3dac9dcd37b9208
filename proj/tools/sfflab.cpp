#include "sfflab/cli.hpp"

int main(int argc, char** argv) { return sfflab::cli::main_entry(argc, argv); }
