#include "entdyn/cli.hpp"

int main(int argc, char** argv) { return entdyn::run_cli(argc, argv); }
