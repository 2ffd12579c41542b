#include "cli/commands.hpp"

int main(int argc, char** argv) { return decs::cli::run(argc, argv); }
