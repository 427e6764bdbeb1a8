#include "esgport/cli.hpp"

int main(int argc, char** argv) { return esgport::run_cli(argc, argv); }
