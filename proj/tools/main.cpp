#include "mskv/cli.hpp"

int main(int argc, char** argv) { return mskv::cli::main(argc, argv); }
