#include "hdtorus/cli.hpp"

int main(int argc, char** argv) { return hdtorus::run_cli(argc, argv); }
