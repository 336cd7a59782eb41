#include "iadt/cli.hpp"

int main(int argc, char** argv) { return iadt::run_cli(argc, argv); }
