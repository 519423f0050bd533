#include "sfpe/cli.hpp"

int main(int argc, char** argv) { return sfpe::run_cli(argc, argv); }
