#include "pqec/cli.hpp"

int main(int argc, char** argv) { return pqec::run_cli(argc, argv); }
