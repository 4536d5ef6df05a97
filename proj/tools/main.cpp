#include "commands.hpp"

int main(int argc, char** argv) { return signalflow::cli::run(argc, argv); }
