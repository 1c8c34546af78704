#include "cli.hpp"

int main(int argc, char** argv) { return gausscurve::cli::run_cli(argc, argv); }
