#include "skewt/cli.hpp"

int main(int argc, char** argv) { return skewt::run_cli(argc, argv); }
