#include "adamir/cli.hpp"

int main(int argc, char** argv) { return adamir::cli::main(argc, argv); }
