#include "mpmab/cli.hpp"

int main(int argc, char** argv) { return mpmab::run_cli(argc, argv); }
