#include "netevo/cli.hpp"

int main(int argc, char** argv) { return netevo::cli::run(argc, argv); }
