#include "commands.hpp"

int main(int argc, char** argv) { return nlslab::cli::run(argc, argv); }
