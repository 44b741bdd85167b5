#include "pilotcap/cli.hpp"

int main(int argc, char** argv) { return pilotcap::cli::run(argc, argv); }
